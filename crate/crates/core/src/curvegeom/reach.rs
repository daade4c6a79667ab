use super::{curvature_extrema, FrenetData, SampledCurve};

/// Conservative reach estimate `min(1/κ₊, d/2)`.
///
/// `d` is the smallest distance `|χ_i − χ_j|` over pairs whose arc separation exceeds
/// `2/κ₊` and where `j` is a local minimiser of `|χ_i − χ_·|`. The global minimum of such
/// pairs is a doubly critical chord. Local minima are refined by parabolic interpolation
/// of the squared distance.
pub fn reach(curve: &SampledCurve, frenet: &FrenetData) -> f64 {
    let (kp, _) = curvature_extrema(frenet);
    let curvature_limit = 1.0 / kp;
    let n = curve.len();
    let ds = curve.spacing();
    let window = (2.0 / kp / ds).ceil() as usize;
    if 2 * window + 3 > n {
        return curvature_limit;
    }
    let pts = curve.points();
    let mut best_sq = f64::INFINITY;
    for i in 0..n {
        let pi = pts[i];
        let dist_sq = |k: usize| (pts[(i + k) % n] - pi).norm_squared();
        // offsets k with arc separation min(k, n-k) > window
        let (lo, hi) = (window + 1, n - window - 1);
        let mut prev = dist_sq(lo - 1);
        let mut cur = dist_sq(lo);
        for k in lo..=hi {
            let next = dist_sq(k + 1);
            if cur <= prev && cur < next {
                let denom = prev - 2.0 * cur + next;
                let refined = if denom > 0.0 {
                    cur - (next - prev) * (next - prev) / (8.0 * denom)
                } else {
                    cur
                };
                best_sq = best_sq.min(refined.max(0.0));
            }
            prev = cur;
            cur = next;
        }
    }
    curvature_limit.min(0.5 * best_sq.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curvegeom::{frenet, CurveShape};

    #[test]
    fn circle_reach_is_radius() {
        for r in [0.5, 3.0] {
            let c = CurveShape::Circle { radius: r }.sample(256).unwrap();
            let f = frenet(&c).unwrap();
            assert!((reach(&c, &f) - r).abs() < 1e-2 * r);
        }
    }

    #[test]
    fn ellipse_reach_is_curvature_limited() {
        let c = CurveShape::Ellipse { a: 2.0, b: 1.0 }.sample(1024).unwrap();
        let f = frenet(&c).unwrap();
        assert!((reach(&c, &f) - 0.5).abs() < 5e-3);
    }
}

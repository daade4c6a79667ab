use super::{CurveError, SampledCurve, MIN_SAMPLES};
use crate::quadrature::gauss_legendre_on;
use crate::Vec3;

/// Closed interpolating cubic spline with chord-length knots.
///
/// Self-intersections of the control polygon are not detected.
#[derive(Debug, Clone)]
pub struct PeriodicSpline {
    points: Vec<Vec3>,
    second: Vec<Vec3>,
    knots: Vec<f64>,
}

impl PeriodicSpline {
    pub fn new(points: &[Vec3]) -> Result<Self, CurveError> {
        let m = points.len();
        if m < 4 {
            return Err(CurveError::TooFewPoints { needed: 4, got: m });
        }
        let knots: Vec<f64> = (0..m).map(|i| (points[(i + 1) % m] - points[i]).norm()).collect();
        if let Some(i) = knots.iter().position(|h| *h <= 0.0 || !h.is_finite()) {
            return Err(CurveError::Degenerate(format!("repeated point at index {i}")));
        }
        // h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = rhs_i, cyclic
        let lower: Vec<f64> = (0..m).map(|i| knots[(i + m - 1) % m]).collect();
        let diag: Vec<f64> = (0..m).map(|i| 2.0 * (knots[(i + m - 1) % m] + knots[i])).collect();
        let upper: Vec<f64> = knots.clone();
        let rhs: Vec<Vec3> = (0..m)
            .map(|i| {
                let prev = (i + m - 1) % m;
                let next = (i + 1) % m;
                6.0 * ((points[next] - points[i]) / knots[i] - (points[i] - points[prev]) / knots[prev])
            })
            .collect();
        let second = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs);
        Ok(Self {
            points: points.to_vec(),
            second,
            knots,
        })
    }

    pub fn segments(&self) -> usize {
        self.points.len()
    }

    /// Chord length (parameter span) of segment `i`.
    pub fn knot(&self, i: usize) -> f64 {
        self.knots[i]
    }

    /// Position and first derivative on segment `i` at local parameter `t ∈ [0, h_i]`.
    pub fn eval(&self, i: usize, t: f64) -> (Vec3, Vec3) {
        let m = self.points.len();
        let j = (i + 1) % m;
        let h = self.knots[i];
        let (p0, p1) = (self.points[i], self.points[j]);
        let (m0, m1) = (self.second[i], self.second[j]);
        let b = (p1 - p0) / h - h * (2.0 * m0 + m1) / 6.0;
        let c = m0 * 0.5;
        let d = (m1 - m0) / (6.0 * h);
        let pos = p0 + b * t + c * (t * t) + d * (t * t * t);
        let der = b + m0 * t + (m1 - m0) * (t * t / (2.0 * h));
        (pos, der)
    }

    fn speed_integral(&self, i: usize, t0: f64, t1: f64, order: usize) -> f64 {
        let (x, w) = gauss_legendre_on(order, t0, t1);
        x.iter().zip(&w).map(|(t, w)| w * self.eval(i, *t).1.norm()).sum()
    }

    /// Arc length of every segment.
    pub fn segment_lengths(&self) -> Vec<f64> {
        (0..self.segments())
            .map(|i| {
                // two panels of 12-point Gauss keep the error far below 1e-12 per segment
                let h = self.knots[i];
                self.speed_integral(i, 0.0, 0.5 * h, 12) + self.speed_integral(i, 0.5 * h, h, 12)
            })
            .collect()
    }

    /// Local parameter on segment `i` at which the arc length from the segment start is `target`.
    fn invert(&self, i: usize, target: f64, seg_len: f64) -> f64 {
        let h = self.knots[i];
        let mut lo = 0.0;
        let mut hi = h;
        let mut t = h * (target / seg_len).clamp(0.0, 1.0);
        for _ in 0..60 {
            let f = self.speed_integral(i, 0.0, t, 12) - target;
            if f.abs() < 1e-14 * seg_len.max(1.0) {
                break;
            }
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = self.eval(i, t).1.norm();
            let newton = t - f / speed;
            t = if newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        t
    }
}

/// Thomas algorithm with a Sherman-Morrison correction for the corner entries.
fn solve_cyclic_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[Vec3]) -> Vec<Vec3> {
    let n = diag.len();
    let alpha = upper[n - 1]; // A[n-1][0]
    let beta = lower[0]; // A[0][n-1]
    let gamma = -diag[0];
    let mut d = diag.to_vec();
    d[0] -= gamma;
    d[n - 1] -= alpha * beta / gamma;

    let solve = |r: &dyn Fn(usize) -> Vec3| -> Vec<Vec3> {
        let mut c = vec![0.0; n];
        let mut x = vec![Vec3::zeros(); n];
        c[0] = upper[0] / d[0];
        x[0] = r(0) / d[0];
        for i in 1..n {
            let denom = d[i] - lower[i] * c[i - 1];
            c[i] = if i < n - 1 { upper[i] / denom } else { 0.0 };
            x[i] = (r(i) - x[i - 1] * lower[i]) / denom;
        }
        for i in (0..n - 1).rev() {
            x[i] = x[i] - x[i + 1] * c[i];
        }
        x
    };
    let y = solve(&|i| rhs[i]);
    let u = |i: usize| -> f64 {
        if i == 0 {
            gamma
        } else if i == n - 1 {
            alpha
        } else {
            0.0
        }
    };
    let z = solve(&|i| Vec3::repeat(u(i)));
    // all three components share the scalar correction vector z (identical columns)
    let vy = |k: usize| y[0][k] + y[n - 1][k] * beta / gamma;
    let vz = z[0][0] + z[n - 1][0] * beta / gamma;
    let factor = Vec3::new(vy(0), vy(1), vy(2)) / (1.0 + vz);
    (0..n)
        .map(|i| y[i] - Vec3::new(z[i][0] * factor.x, z[i][0] * factor.y, z[i][0] * factor.z))
        .collect()
}

/// Resamples a closed polyline to `n` points equally spaced in arc length along the
/// closed cubic spline through the input points. The first output point coincides with
/// the first input point. Self-intersecting input is not detected.
pub fn resample_arclength(raw: &[Vec3], n: usize) -> Result<SampledCurve, CurveError> {
    if raw.len() < 4 {
        return Err(CurveError::TooFewPoints {
            needed: 4,
            got: raw.len(),
        });
    }
    if n < MIN_SAMPLES {
        return Err(CurveError::TooFewPoints {
            needed: MIN_SAMPLES,
            got: n,
        });
    }
    let spline = PeriodicSpline::new(raw)?;
    let seg = spline.segment_lengths();
    let total: f64 = seg.iter().sum();
    let ds = total / n as f64;
    let mut out = Vec::with_capacity(n);
    let mut seg_idx = 0;
    let mut seg_start = 0.0;
    for k in 0..n {
        let target = k as f64 * ds;
        while seg_idx < seg.len() - 1 && seg_start + seg[seg_idx] <= target {
            seg_start += seg[seg_idx];
            seg_idx += 1;
        }
        let local = target - seg_start;
        let t = if local <= 0.0 {
            0.0
        } else {
            spline.invert(seg_idx, local, seg[seg_idx])
        };
        out.push(spline.eval(seg_idx, t).0);
    }
    SampledCurve::from_uniform(out, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn circle_pts(m: usize, r: f64) -> Vec<Vec3> {
        (0..m)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / m as f64;
                Vec3::new(r * t.cos(), r * t.sin(), 0.0)
            })
            .collect()
    }

    #[test]
    fn circle_length_preserved() {
        let c = resample_arclength(&circle_pts(64, 2.0), 64).unwrap();
        let l = 4.0 * PI;
        assert!((c.length() - l).abs() < 1e-4 * l);
        assert!((c.spacing() - l / 64.0).abs() < 1e-4 * l / 64.0);
    }

    #[test]
    fn uniform_input_is_a_fixed_point() {
        let raw = circle_pts(64, 2.0);
        let c = resample_arclength(&raw, 64).unwrap();
        for (a, b) in raw.iter().zip(c.points()) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn too_few_points_rejected() {
        let raw = circle_pts(3, 1.0);
        assert!(matches!(
            resample_arclength(&raw, 32),
            Err(CurveError::TooFewPoints { needed: 4, got: 3 })
        ));
        let raw = circle_pts(40, 1.0);
        assert!(matches!(
            resample_arclength(&raw, 8),
            Err(CurveError::TooFewPoints { .. })
        ));
    }

    #[test]
    fn non_uniform_input_becomes_uniform() {
        // ellipse sampled uniformly in angle is not uniform in arc length
        let raw: Vec<Vec3> = (0..400)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 400.0;
                Vec3::new(2.0 * t.cos(), t.sin(), 0.0)
            })
            .collect();
        let c = resample_arclength(&raw, 128).unwrap();
        let ds = c.spacing();
        for i in 0..c.len() {
            let gap = (c.point(i as isize + 1) - c.point(i as isize)).norm();
            assert!((gap - ds).abs() < 2e-3 * ds);
        }
        // complete elliptic integral value for a=2, b=1
        assert!((c.length() - 9.688448220547675).abs() < 1e-6);
    }

    #[test]
    fn cyclic_solver_matches_dense_product() {
        let n = 7;
        let lower: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
        let upper: Vec<f64> = (0..n).map(|i| 0.5 + 0.2 * i as f64).collect();
        let diag: Vec<f64> = (0..n).map(|i| 5.0 + i as f64).collect();
        let x_true: Vec<Vec3> = (0..n).map(|i| Vec3::new(i as f64, 1.0 - i as f64, 0.3)).collect();
        let rhs: Vec<Vec3> = (0..n)
            .map(|i| x_true[(i + n - 1) % n] * lower[i] + x_true[i] * diag[i] + x_true[(i + 1) % n] * upper[i])
            .collect();
        let x = solve_cyclic_tridiagonal(&lower, &diag, &upper, &rhs);
        for (a, b) in x.iter().zip(&x_true) {
            assert!((a - b).norm() < 1e-12);
        }
    }
}

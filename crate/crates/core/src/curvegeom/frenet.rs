use super::{CurveError, SampledCurve};
use crate::Vec3;

/// Frenet frame, curvature and torsion at every sample of a [`SampledCurve`].
///
/// Torsion follows `B' = -τ N` with the right-handed binormal `B = T × N`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrenetData {
    pub tangent: Vec<Vec3>,
    pub normal: Vec<Vec3>,
    pub binormal: Vec<Vec3>,
    pub curvature: Vec<f64>,
    pub torsion: Vec<f64>,
}

impl FrenetData {
    pub fn len(&self) -> usize {
        self.tangent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tangent.is_empty()
    }

    /// Largest deviation of the Gram matrix of `(T, N, B)` from the identity.
    pub fn frame_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.len() {
            let f = [self.tangent[i], self.normal[i], self.binormal[i]];
            for a in 0..3 {
                for b in 0..3 {
                    let target = if a == b { 1.0 } else { 0.0 };
                    worst = worst.max((f[a].dot(&f[b]) - target).abs());
                }
            }
        }
        worst
    }
}

fn cyc<T: Copy>(v: &[T], i: isize) -> T {
    v[i.rem_euclid(v.len() as isize) as usize]
}

/// First derivative by the five-point stencil with step `h`.
pub(crate) fn d1<T>(v: &[T], i: usize, h: f64) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let i = i as isize;
    ((cyc(v, i - 1) - cyc(v, i + 1)) * 8.0 + (cyc(v, i + 2) - cyc(v, i - 2))) * (-1.0 / (12.0 * h))
}

/// Second derivative by the five-point stencil with step `h`.
pub(crate) fn d2<T>(v: &[T], i: usize, h: f64) -> T
where
    T: Copy + std::ops::Sub<Output = T> + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    let i = i as isize;
    let c = cyc(v, i);
    ((cyc(v, i + 1) - c) * 16.0 + (cyc(v, i - 1) - c) * 16.0 - (cyc(v, i + 2) - c) - (cyc(v, i - 2) - c))
        * (1.0 / (12.0 * h * h))
}

/// Computes the Frenet apparatus with fourth-order central differences.
///
/// Fails with [`CurveError::NonRegularCurve`] where the normal component of `χ''` drops
/// below `1e-8 / Δs`.
pub fn frenet(curve: &SampledCurve) -> Result<FrenetData, CurveError> {
    let pts = curve.points();
    let n = pts.len();
    let ds = curve.spacing();
    let threshold = 1e-8 / ds;
    let mut tangent = Vec::with_capacity(n);
    let mut normal = Vec::with_capacity(n);
    let mut binormal = Vec::with_capacity(n);
    let mut curvature = Vec::with_capacity(n);
    let mut speed = Vec::with_capacity(n);
    for i in 0..n {
        let v = d1(pts, i, ds);
        let a = d2(pts, i, ds);
        let sp = v.norm();
        let t = v / sp;
        let perp = a - t * a.dot(&t);
        let pn = perp.norm();
        if pn < threshold {
            return Err(CurveError::NonRegularCurve {
                index: i,
                value: pn,
                threshold,
            });
        }
        let nn = perp / pn;
        tangent.push(t);
        normal.push(nn);
        binormal.push(t.cross(&nn));
        curvature.push(v.cross(&a).norm() / (sp * sp * sp));
        speed.push(sp);
    }
    let torsion = (0..n)
        .map(|i| -d1(&binormal, i, ds).dot(&normal[i]) / speed[i])
        .collect();
    Ok(FrenetData {
        tangent,
        normal,
        binormal,
        curvature,
        torsion,
    })
}

/// `(κ₊, τ₊)`: the largest sampled `|κ|` and `|τ|`.
pub fn curvature_extrema(frenet: &FrenetData) -> (f64, f64) {
    let kp = frenet.curvature.iter().fold(0.0_f64, |m, k| m.max(k.abs()));
    let tp = frenet.torsion.iter().fold(0.0_f64, |m, t| m.max(t.abs()));
    (kp, tp)
}

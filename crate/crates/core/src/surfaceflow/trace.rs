use super::{SurfaceField, SurfaceFlowError};
use crate::quadrature::bisect;
use crate::torusgeom::TubeSpec;
use crate::Vec3;
use std::f64::consts::PI;

/// Fixed-step trajectory in the lifted chart, with the embedded arc length.
///
/// Nodal derivatives are kept so that the path can be evaluated between nodes by cubic
/// Hermite interpolation.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldLinePath {
    pub times: Vec<f64>,
    /// Lifted `s`, not reduced modulo `L`.
    pub s: Vec<f64>,
    /// Lifted `φ`, not reduced modulo `2π`.
    pub phi: Vec<f64>,
    /// Embedded length from the start.
    pub length: Vec<f64>,
    derivs: Vec<[f64; 3]>,
    period_s: f64,
}

impl FieldLinePath {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Period `L` of the `s` coordinate.
    pub fn period_s(&self) -> f64 {
        self.period_s
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times[0]
    }

    /// `(s, φ, length)` at time `t` by cubic Hermite interpolation.
    pub fn interpolate(&self, t: f64) -> [f64; 3] {
        let n = self.times.len();
        let t0 = self.times[0];
        let dt = (self.times[n - 1] - t0) / (n - 1) as f64;
        let k = (((t - t0) / dt).floor().max(0.0) as usize).min(n - 2);
        let u = ((t - self.times[k]) / dt).clamp(0.0, 1.0);
        let (h00, h10, h01, h11) = (
            2.0 * u * u * u - 3.0 * u * u + 1.0,
            u * u * u - 2.0 * u * u + u,
            -2.0 * u * u * u + 3.0 * u * u,
            u * u * u - u * u,
        );
        let y0 = [self.s[k], self.phi[k], self.length[k]];
        let y1 = [self.s[k + 1], self.phi[k + 1], self.length[k + 1]];
        let (d0, d1) = (self.derivs[k], self.derivs[k + 1]);
        [0, 1, 2].map(|c| h00 * y0[c] + h10 * dt * d0[c] + h01 * y1[c] + h11 * dt * d1[c])
    }

    /// Points `Ψ(s, 1, φ)` along the path.
    pub fn embedded(&self, tube: &TubeSpec) -> Vec<Vec3> {
        let l = tube.length();
        self.s
            .iter()
            .zip(&self.phi)
            .map(|(s, p)| tube.embed(s.rem_euclid(l), 1.0, *p))
            .collect()
    }
}

/// Integrates `(ṡ, φ̇) = (f_s, f_φ)` with classical RK4 on `n = round(T/dt)` equal steps,
/// together with the embedded speed from the first fundamental form.
pub fn trace(
    tube: &TubeSpec,
    field: &SurfaceField,
    start: (f64, f64),
    t_end: f64,
    dt: f64,
) -> Result<FieldLinePath, SurfaceFlowError> {
    if !(t_end.is_finite() && t_end > 0.0 && dt.is_finite() && dt > 0.0) {
        return Err(SurfaceFlowError::InvalidParameter(format!(
            "duration and step must be positive, got T = {t_end}, dt = {dt}"
        )));
    }
    let steps = (t_end / dt).round().max(1.0) as usize;
    let h = t_end / steps as f64;
    let l = tube.length();
    let rhs = |t: f64, y: [f64; 3]| -> Result<[f64; 3], SurfaceFlowError> {
        let (fs, fp) = field.eval(y[0], y[1]);
        if !(fs.is_finite() && fp.is_finite()) || fs * fs + fp * fp < 1e-24 {
            return Err(SurfaceFlowError::FieldVanished { t, s: y[0], phi: y[1] });
        }
        let g = tube.boundary_metric(y[0].rem_euclid(l), y[1]);
        let speed2 = g[0][0] * fs * fs + 2.0 * g[0][1] * fs * fp + g[1][1] * fp * fp;
        Ok([fs, fp, speed2.max(0.0).sqrt()])
    };
    let mut y = [start.0, start.1, 0.0];
    let mut path = FieldLinePath {
        times: Vec::with_capacity(steps + 1),
        s: Vec::with_capacity(steps + 1),
        phi: Vec::with_capacity(steps + 1),
        length: Vec::with_capacity(steps + 1),
        derivs: Vec::with_capacity(steps + 1),
        period_s: l,
    };
    let mut k1 = rhs(0.0, y)?;
    for step in 0..steps {
        let t = step as f64 * h;
        path.times.push(t);
        path.s.push(y[0]);
        path.phi.push(y[1]);
        path.length.push(y[2]);
        path.derivs.push(k1);
        let add = |a: [f64; 3], b: [f64; 3], c: f64| [a[0] + c * b[0], a[1] + c * b[1], a[2] + c * b[2]];
        let k2 = rhs(t + 0.5 * h, add(y, k1, 0.5 * h))?;
        let k3 = rhs(t + 0.5 * h, add(y, k2, 0.5 * h))?;
        let k4 = rhs(t + h, add(y, k3, h))?;
        let next = [0, 1, 2].map(|c| y[c] + h / 6.0 * (k1[c] + 2.0 * k2[c] + 2.0 * k3[c] + k4[c]));
        let (ds, dphi) = (next[0] - y[0], next[1] - y[1]);
        if ds.abs() >= 0.1 * l || dphi.abs() >= 0.2 * PI {
            return Err(SurfaceFlowError::StepTooLarge { step, ds, dphi });
        }
        y = next;
        k1 = rhs(t + h, y)?;
    }
    path.times.push(t_end);
    path.s.push(y[0]);
    path.phi.push(y[1]);
    path.length.push(y[2]);
    path.derivs.push(k1);
    Ok(path)
}

/// Times `Tₙ` at which the lifted angle first reaches `φ(0) ± 2πn`, the sign being that of
/// the net advance over the path.
pub fn poloidal_turn_markers(path: &FieldLinePath) -> Result<Vec<f64>, SurfaceFlowError> {
    let phi0 = path.phi[0];
    let net = path.phi[path.len() - 1] - phi0;
    let sign = if net >= 0.0 { 1.0 } else { -1.0 };
    let advance = |k: usize| sign * (path.phi[k] - phi0);
    let mut markers = Vec::new();
    let mut turn = 1.0;
    for k in 1..path.len() {
        while advance(k) >= 2.0 * PI * turn {
            let target = 2.0 * PI * turn;
            let f = |t: f64| sign * (path.interpolate(t)[1] - phi0) - target;
            let (a, b) = (path.times[k - 1], path.times[k]);
            let t = if advance(k - 1) >= target {
                a
            } else {
                bisect(f, a, b, 1e-14 * b.abs().max(1.0), 200)
            };
            markers.push(t);
            turn += 1.0;
        }
    }
    if markers.is_empty() {
        return Err(SurfaceFlowError::NoTurns { advance: net.abs() });
    }
    Ok(markers)
}

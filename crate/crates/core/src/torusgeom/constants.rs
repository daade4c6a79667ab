use super::{ring_diameter, volume, TubeKind, TubeSpec};
use serde::Serialize;
use std::f64::consts::PI;

/// Geometric constants of a solid torus, as sampled on its boundary grid.
///
/// Suprema and infima are taken over the core samples times `n_φ` section samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeometricConstants {
    pub kappa_plus: f64,
    pub tau_plus: f64,
    /// Defined for constant-radius tubes only.
    pub eta: Option<f64>,
    pub xi: f64,
    /// Largest cross-section perimeter.
    #[serde(rename = "Pi")]
    pub pi: f64,
    /// Largest cross-section diameter.
    pub delta: f64,
    pub beta: f64,
    pub alpha_minus: f64,
    pub alpha_plus: f64,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "R")]
    pub radius: Option<f64>,
    pub volume: f64,
    pub reach: f64,
    /// `1 − κ₊δ`; the regular-torus estimates need it positive.
    pub one_minus_kappa_delta: f64,
}

/// `η = √((1−κ₊R)² / ((1−κ₊R)² + R²τ₊²))`.
pub fn eta(kappa_plus: f64, tau_plus: f64, radius: f64) -> f64 {
    let a = (1.0 - kappa_plus * radius).powi(2);
    (a / (a + radius * radius * tau_plus * tau_plus)).sqrt()
}

/// `ξ = (α₋/α₊)·√((1−κ₊δ)² / ((1−κ₊δ)² + 2(τ₊²δ² + β²)))`, set to zero when `1−κ₊δ ≤ 0`.
pub fn xi(kappa_plus: f64, tau_plus: f64, delta: f64, beta: f64, alpha_minus: f64, alpha_plus: f64) -> f64 {
    let j = 1.0 - kappa_plus * delta;
    if j <= 0.0 {
        return 0.0;
    }
    let a = j * j;
    alpha_minus / alpha_plus * (a / (a + 2.0 * (tau_plus * tau_plus * delta * delta + beta * beta))).sqrt()
}

pub fn geometric_constants(tube: &TubeSpec) -> GeometricConstants {
    let n_phi = tube.n_phi();
    let dphi = 2.0 * PI / n_phi as f64;
    let sec = tube.sections();
    let (mut pi_max, mut delta, mut beta) = (0.0_f64, 0.0_f64, 0.0_f64);
    let (mut a_min, mut a_max) = (f64::INFINITY, 0.0_f64);
    for i in 0..tube.curve().len() {
        let s = tube.curve().arclength_at(i);
        let mut per = 0.0;
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let dp = sec.d_phi(s, phi);
            let a = dp[0].hypot(dp[1]);
            per += a * dphi;
            a_min = a_min.min(a);
            a_max = a_max.max(a);
            let ds = sec.d_s(s, phi);
            beta = beta.max(ds[0].hypot(ds[1]));
        }
        pi_max = pi_max.max(per);
        delta = delta.max(ring_diameter(&tube.section_ring(s)));
    }
    let (kp, tp) = (tube.kappa_plus(), tube.tau_plus());
    let radius = match tube.kind() {
        TubeKind::ConstantRadius { radius } => Some(radius),
        TubeKind::Regular => None,
    };
    GeometricConstants {
        kappa_plus: kp,
        tau_plus: tp,
        eta: radius.map(|r| eta(kp, tp, r)),
        xi: xi(kp, tp, delta, beta, a_min, a_max),
        pi: pi_max,
        delta,
        beta,
        alpha_minus: a_min,
        alpha_plus: a_max,
        length: tube.length(),
        radius,
        volume: volume(tube),
        reach: tube.reach(),
        one_minus_kappa_delta: 1.0 - kp * delta,
    }
}

use super::{TubeKind, TubeSpec};
use crate::quadrature::gauss_legendre_on;
use crate::Vec3;
use serde::Serialize;
use std::f64::consts::PI;

/// Default number of Gauss nodes in the radial direction of the section.
pub const DEFAULT_N_RHO: usize = 64;

/// Integrates `g(κ, ρ, b, b')·ρ·(b × b')` over `s ∈ [0,L)`, `φ ∈ [0,2π)`, `ρ ∈ [0,1]`, where
/// `ρ·(b × b')` is the polar area element of the section. Trapezoid in `s` and `φ`
/// (periodic), Gauss-Legendre in `ρ`.
fn integrate_solid<F: Fn(f64, f64, [f64; 2]) -> f64>(tube: &TubeSpec, n_rho: usize, g: F) -> f64 {
    let (nodes, weights) = gauss_legendre_on(n_rho, 0.0, 1.0);
    let n_phi = tube.n_phi();
    let dphi = 2.0 * PI / n_phi as f64;
    let ds = tube.curve().spacing();
    let sec = tube.sections();
    let mut total = 0.0;
    for i in 0..tube.curve().len() {
        let s = tube.curve().arclength_at(i);
        let kappa = tube.frenet().curvature[i];
        let mut slice = 0.0;
        for j in 0..n_phi {
            let phi = j as f64 * dphi;
            let b = sec.boundary(s, phi);
            let bp = sec.d_phi(s, phi);
            let cross = b[0] * bp[1] - b[1] * bp[0];
            let radial: f64 = nodes
                .iter()
                .zip(&weights)
                .map(|(rho, w)| w * rho * g(kappa, *rho, b))
                .sum();
            slice += cross * radial;
        }
        total += slice * dphi;
    }
    total * ds
}

/// Volume `∫ (1 − κμ) dA ds` of the solid torus.
pub fn volume(tube: &TubeSpec) -> f64 {
    // the integrand is quadratic in ρ, so two Gauss nodes are exact
    integrate_solid(tube, 2, |kappa, rho, b| 1.0 - kappa * rho * b[0])
}

/// The closed comparison field `X = T / (L (1 − κμ))`, which pulls back to `ds / L`.
#[derive(Debug, Clone, Copy)]
pub struct CurlFreeField<'a> {
    tube: &'a TubeSpec,
}

pub fn build_curlfree_x(tube: &TubeSpec) -> CurlFreeField<'_> {
    CurlFreeField { tube }
}

impl CurlFreeField<'_> {
    /// `X` at core sample `i` and section coordinates `(ρ, φ)`.
    pub fn value_at_sample(&self, i: usize, rho: f64, phi: f64) -> Vec3 {
        let t = self.tube;
        let s = t.curve().arclength_at(i);
        let mu = rho * t.sections().boundary(s, phi)[0];
        t.frenet().tangent[i] / (t.length() * (1.0 - t.frenet().curvature[i] * mu))
    }

    /// `∫_χ X`, the line integral along the core curve.
    pub fn core_line_integral(&self) -> f64 {
        let t = self.tube;
        let ds = t.curve().spacing();
        (0..t.curve().len())
            .map(|i| self.value_at_sample(i, 0.0, 0.0).dot(&t.frenet().tangent[i]) * ds)
            .sum()
    }
}

/// `‖X‖²` by volume quadrature together with its closed reductions and upper bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurlFreeNorm {
    pub norm_sq: f64,
    /// One-dimensional reduction, constant-radius tubes only.
    pub norm_sq_reduced: Option<f64>,
    /// `√|Ω| / (L (1 − κ₊δ))`, when `1 − κ₊δ > 0`.
    pub bound_regular: Option<f64>,
    /// `R √(2π / L)`, constant-radius tubes only.
    pub bound_tube: Option<f64>,
}

pub fn norm_curlfree_x(tube: &TubeSpec) -> CurlFreeNorm {
    norm_curlfree_x_with(tube, DEFAULT_N_RHO)
}

pub fn norm_curlfree_x_with(tube: &TubeSpec, n_rho: usize) -> CurlFreeNorm {
    let l = tube.length();
    // |X|² (1 − κμ) = 1 / (L² (1 − κμ))
    let norm_sq = integrate_solid(tube, n_rho, |kappa, rho, b| 1.0 / (1.0 - kappa * rho * b[0])) / (l * l);
    let radius = match tube.kind() {
        TubeKind::ConstantRadius { radius } => Some(radius),
        TubeKind::Regular => None,
    };
    let norm_sq_reduced = radius.map(|r| {
        let ds = tube.curve().spacing();
        let integral: f64 = tube
            .frenet()
            .curvature
            .iter()
            .map(|k| half_angle_kernel(k * r) * ds)
            .sum();
        2.0 * PI * r * r / (l * l) * integral
    });
    let v = volume(tube);
    let delta = super::geometric_constants(tube).delta;
    let j = 1.0 - tube.kappa_plus() * delta;
    CurlFreeNorm {
        norm_sq,
        norm_sq_reduced,
        bound_regular: (j > 0.0).then(|| v.sqrt() / (l * j)),
        bound_tube: radius.map(|r| r * (2.0 * PI / l).sqrt()),
    }
}

/// `(1 − √(1 − z²)) / z²`, with its limit `1/2` at `z = 0`.
fn half_angle_kernel(z: f64) -> f64 {
    let z2 = z * z;
    // rationalised form avoids cancellation for small z
    1.0 / (1.0 + (1.0 - z2).sqrt())
}

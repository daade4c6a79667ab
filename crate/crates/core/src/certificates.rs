//! Non-optimality certificates and eigenvalue bounds for solid tori.
//!
//! Every certificate evaluates one scalar inequality `lhs (>=|<=) rhs`; when it holds the
//! domain cannot maximise the largest positive Biot-Savart eigenvalue in its volume class.
//! Boundary cases count as holding. Reports carry `lhs`, `rhs` and `direction` so that
//! verdicts can be re-checked externally.

use crate::quadrature::bisect;
use crate::torusgeom::{geometric_constants, GeometricConstants, TubeSpec};
use serde::Serialize;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

/// Aspect-ratio style constant of the tube certificate: `L/R ≥ TUBE_CONSTANT / η³`.
pub const TUBE_CONSTANT: f64 = 223.0;

/// Rounded threshold of the regular-torus certificate.
pub const REGULAR_CONSTANT: f64 = 13.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("volume must be positive, got {0}")]
    NonPositiveVolume(f64),
    #[error("the tube certificate needs a constant-radius tube")]
    WrongKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certificate {
    /// Rotationally symmetric solid torus: `|Ω| ≤ d₋³`.
    Axisymmetric,
    /// Constant-radius tube: `L/R ≥ 223/η³`.
    Tube,
    /// Regular solid torus: `Π L ξ (1 − κ₊δ) / |Ω|^{2/3} ≥ 13`.
    Regular,
    /// Rope-length lower bound from the crossing number against `223/η³`.
    RopeCrossing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    NonOptimal,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Direction {
    #[serde(rename = ">=")]
    GreaterEqual,
    #[serde(rename = "<=")]
    LessEqual,
}

/// Outcome of one certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateReport {
    pub certificate: Certificate,
    pub verdict: Verdict,
    pub lhs: f64,
    pub rhs: f64,
    pub direction: Direction,
    /// Nonnegative exactly when the inequality holds.
    pub margin: f64,
    /// Unrounded threshold implied by the ball comparison, where one exists.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sharp_threshold: Option<f64>,
    /// Scalar inputs the inequality was evaluated from.
    pub inputs: BTreeMap<String, f64>,
}

impl CertificateReport {
    fn new(certificate: Certificate, lhs: f64, rhs: f64, direction: Direction, inputs: &[(&str, f64)]) -> Self {
        let (holds, margin) = match direction {
            Direction::GreaterEqual => (lhs >= rhs, lhs - rhs),
            Direction::LessEqual => (lhs <= rhs, rhs - lhs),
        };
        let inputs = inputs.iter().map(|(k, v)| (k.to_string(), *v)).collect();
        Self {
            certificate,
            verdict: if holds {
                Verdict::NonOptimal
            } else {
                Verdict::Inconclusive
            },
            lhs,
            rhs,
            direction,
            margin,
            sharp_threshold: None,
            inputs,
        }
    }
}

/// Smallest positive nontrivial root of `tan x = x`, located in `(π, 3π/2)` as the root of
/// `sin x − x cos x`.
pub fn solve_x0() -> f64 {
    let mut x = bisect(|x| x.sin() - x * x.cos(), PI, 1.5 * PI, 1e-13, 200);
    // Newton polish to the last ulp; the derivative is x sin x
    for _ in 0..3 {
        x -= (x.sin() - x * x.cos()) / (x * x.sin());
    }
    x
}

/// Largest positive Biot-Savart eigenvalue of the ball of volume `v`: `r / x₀`.
pub fn ball_lambda_plus(v: f64) -> Result<f64, CertificateError> {
    if v.is_nan() || v <= 0.0 {
        return Err(CertificateError::NonPositiveVolume(v));
    }
    Ok((3.0 * v / (4.0 * PI)).cbrt() / solve_x0())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EnergyBound {
    Coarse,
    Sharp,
}

/// `c` in `|𝓗(B)| ≤ c ‖B‖²`: `(3V/4π)^{1/3}` (coarse) or `(πV/16)^{1/3}` (sharp).
pub fn helicity_energy_coefficient(v: f64, which: EnergyBound) -> Result<f64, CertificateError> {
    if v.is_nan() || v <= 0.0 {
        return Err(CertificateError::NonPositiveVolume(v));
    }
    Ok(match which {
        EnergyBound::Coarse => (3.0 * v / (4.0 * PI)).cbrt(),
        EnergyBound::Sharp => (PI * v / 16.0).cbrt(),
    })
}

/// Fires when `V ≤ d₋³`, with `d₋` the distance of the domain from its symmetry axis.
pub fn axisym_certificate(v: f64, d_minus: f64) -> CertificateReport {
    CertificateReport::new(
        Certificate::Axisymmetric,
        v,
        d_minus.powi(3),
        Direction::LessEqual,
        &[("volume", v), ("d_minus", d_minus)],
    )
}

/// Upper bound `V^{1/3} (√3/4π) V^{1/6} / √d₋` on `λ₊` of a rotationally symmetric torus.
pub fn axisym_lambda_upper(v: f64, d_minus: f64) -> f64 {
    v.cbrt() * 3f64.sqrt() / (4.0 * PI) * v.powf(1.0 / 6.0) / d_minus.sqrt()
}

/// Unrounded tube threshold `(4/3) x₀³ / (2/3)^{3/2}` on `η³ L/R`.
pub fn tube_sharp_threshold() -> f64 {
    4.0 / 3.0 * solve_x0().powi(3) / (2.0f64 / 3.0).powf(1.5)
}

/// Unrounded regular-torus threshold `(4π)^{1/3} x₀ 3^{1/6}`.
pub fn regular_sharp_threshold() -> f64 {
    (4.0 * PI).cbrt() * solve_x0() * 3f64.powf(1.0 / 6.0)
}

/// Fires when the rope length `L/R` is at least `223/η³`.
pub fn tube_certificate(gc: &GeometricConstants) -> Result<CertificateReport, CertificateError> {
    let (r, eta) = gc.radius.zip(gc.eta).ok_or(CertificateError::WrongKind)?;
    let rope = gc.length / r;
    let mut rep = CertificateReport::new(
        Certificate::Tube,
        rope,
        TUBE_CONSTANT / eta.powi(3),
        Direction::GreaterEqual,
        &[("L", gc.length), ("R", r), ("eta", eta), ("rope_length", rope)],
    );
    rep.sharp_threshold = Some(tube_sharp_threshold() / eta.powi(3));
    Ok(rep)
}

/// Fires when `Π L ξ (1 − κ₊δ) / V^{2/3} ≥ 13`.
pub fn regular_certificate(gc: &GeometricConstants, v: f64) -> CertificateReport {
    let j = 1.0 - gc.kappa_plus * gc.delta;
    let lhs = gc.pi * gc.length * gc.xi * j / v.powf(2.0 / 3.0);
    let mut rep = CertificateReport::new(
        Certificate::Regular,
        lhs,
        REGULAR_CONSTANT,
        Direction::GreaterEqual,
        &[
            ("Pi", gc.pi),
            ("L", gc.length),
            ("xi", gc.xi),
            ("kappa_plus", gc.kappa_plus),
            ("delta", gc.delta),
            ("volume", v),
        ],
    );
    rep.sharp_threshold = Some(regular_sharp_threshold());
    rep
}

/// `max{4√π √Cr, (4π Cr / 11)^{3/4}}`, a lower bound on the rope length of any knot with
/// crossing number `Cr`.
pub fn rope_length_lower_bound(crossing_number: u64) -> f64 {
    let c = crossing_number as f64;
    (4.0 * PI.sqrt() * c.sqrt()).max((4.0 * PI / 11.0 * c).powf(0.75))
}

/// Fires when the rope-length lower bound for the knot type already reaches `223/η³`, so
/// every tube with this `η` around a knot of that crossing number is certified.
pub fn rope_crossing_certificate(
    gc: &GeometricConstants,
    crossing_number: u64,
) -> Result<CertificateReport, CertificateError> {
    let eta = gc.eta.ok_or(CertificateError::WrongKind)?;
    Ok(CertificateReport::new(
        Certificate::RopeCrossing,
        rope_length_lower_bound(crossing_number),
        TUBE_CONSTANT / eta.powi(3),
        Direction::GreaterEqual,
        &[("crossing_number", crossing_number as f64), ("eta", eta)],
    ))
}

/// Lower bounds on `|μ|` and upper bounds on `λ₊ = 1/μ`. They hold for eigenfields that
/// satisfy the hypotheses of the comparison argument, which are not verified here.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenvalueBounds {
    /// Best available lower bound on `|μ|`.
    pub mu_lower: f64,
    /// `1 / mu_lower`, absent when `mu_lower ≤ 0`.
    pub lambda_upper: Option<f64>,
    pub regular_mu_lower: f64,
    /// Present for constant-radius tubes.
    pub tube_mu_lower: Option<f64>,
    pub conditional: bool,
}

pub fn eigenvalue_bounds(gc: &GeometricConstants, v: f64) -> EigenvalueBounds {
    let v13 = v.cbrt();
    let j = 1.0 - gc.kappa_plus * gc.delta;
    let regular = gc.pi * gc.xi * gc.length * j / (3f64.sqrt() * v.powf(2.0 / 3.0)) / v13;
    let tube = gc
        .radius
        .zip(gc.eta)
        .map(|(r, eta)| (gc.length / r).cbrt() * (2.0f64 / 3.0).sqrt() * PI.cbrt() * eta / v13);
    let mu_lower = tube.map_or(regular, |t| t.max(regular));
    EigenvalueBounds {
        mu_lower,
        lambda_upper: (mu_lower > 0.0).then(|| 1.0 / mu_lower),
        regular_mu_lower: regular,
        tube_mu_lower: tube,
        conditional: true,
    }
}

/// Every certificate that applies to `tube`, with the geometric constants used.
pub fn certify(tube: &TubeSpec, crossing_number: Option<u64>) -> (GeometricConstants, Vec<CertificateReport>) {
    let gc = geometric_constants(tube);
    let mut out = Vec::new();
    if let Some(d) = tube.axis_distance() {
        out.push(axisym_certificate(gc.volume, d));
    }
    if let Ok(rep) = tube_certificate(&gc) {
        out.push(rep);
    }
    out.push(regular_certificate(&gc, gc.volume));
    if let Some(cr) = crossing_number {
        if let Ok(rep) = rope_crossing_certificate(&gc, cr) {
            out.push(rep);
        }
    }
    (gc, out)
}

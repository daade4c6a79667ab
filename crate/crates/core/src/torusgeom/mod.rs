//! Tubular neighbourhoods and regular solid tori built around a closed core curve.
//!
//! A solid torus is the image of `Ψ(s, ρ, φ) = χ(s) + μ N(s) + ν B(s)` with
//! `(μ, ν) = ρ·ψ_s(1, φ)` and `(N, B)` the Frenet normal and binormal of the core.

mod constants;
mod sections;
mod volume;

pub use constants::{geometric_constants, GeometricConstants};
pub use sections::{Disc, RotatingEllipse, SectionFamily, SectionInput};
pub use volume::{build_curlfree_x, norm_curlfree_x, volume, CurlFreeField, CurlFreeNorm};

use crate::curvegeom::{curvature_extrema, frenet, lagrange4, reach, CurveError, CurveInput, FrenetData, SampledCurve};
use crate::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;
use thiserror::Error;

/// Default number of boundary samples per cross-section.
pub const DEFAULT_N_PHI: usize = 128;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TubeError {
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("tube radius {radius} too thick: reach {reach}, kappa_plus*R = {kappa_r}")]
    TubeTooThick { radius: f64, reach: f64, kappa_r: f64 },
    #[error("invalid embedding: {0}")]
    EmbeddingInvalid(String),
    #[error("malformed tube specification: {0}")]
    Malformed(String),
}

/// Which construction produced a [`TubeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeKind {
    ConstantRadius { radius: f64 },
    Regular,
}

/// Validated solid torus around a sampled core curve.
#[derive(Debug, Clone)]
pub struct TubeSpec {
    curve: SampledCurve,
    frenet: FrenetData,
    sections: Arc<dyn SectionFamily>,
    kind: TubeKind,
    kappa_plus: f64,
    tau_plus: f64,
    reach: f64,
    n_phi: usize,
}

/// Frenet data interpolated at an arbitrary arc length.
#[derive(Debug, Clone, Copy)]
pub struct FrameSample {
    pub position: Vec3,
    pub tangent: Vec3,
    pub normal: Vec3,
    pub binormal: Vec3,
    pub curvature: f64,
    pub torsion: f64,
}

/// Constant-radius tube of radius `radius`. Requires `radius < reach` and `κ₊·radius < 1`.
pub fn embed_tube(curve: SampledCurve, radius: f64) -> Result<TubeSpec, TubeError> {
    if !(radius.is_finite() && radius > 0.0) {
        return Err(TubeError::Malformed(format!("radius must be positive, got {radius}")));
    }
    let mut tube = TubeSpec::unchecked(curve, Arc::new(Disc { radius }))?;
    tube.kind = TubeKind::ConstantRadius { radius };
    let kappa_r = tube.kappa_plus * radius;
    if radius >= tube.reach || kappa_r >= 1.0 {
        return Err(TubeError::TubeTooThick {
            radius,
            reach: tube.reach,
            kappa_r,
        });
    }
    Ok(tube)
}

/// Regular solid torus with the given section family. Requires the largest section
/// diameter to stay below the reach and `1 − κ μ > 0` on every boundary sample.
pub fn embed_regular(curve: SampledCurve, sections: Arc<dyn SectionFamily>) -> Result<TubeSpec, TubeError> {
    let tube = TubeSpec::unchecked(curve, sections)?;
    tube.validate_regular()?;
    Ok(tube)
}

impl TubeSpec {
    fn unchecked(curve: SampledCurve, sections: Arc<dyn SectionFamily>) -> Result<Self, TubeError> {
        let fr = frenet(&curve)?;
        let (kappa_plus, tau_plus) = curvature_extrema(&fr);
        let reach = reach(&curve, &fr);
        Ok(Self {
            curve,
            frenet: fr,
            sections,
            kind: TubeKind::Regular,
            kappa_plus,
            tau_plus,
            reach,
            n_phi: DEFAULT_N_PHI,
        })
    }

    fn validate_regular(&self) -> Result<(), TubeError> {
        let n_phi = self.n_phi;
        let mut diam: f64 = 0.0;
        for i in 0..self.curve.len() {
            let s = self.curve.arclength_at(i);
            let ring = self.section_ring(s);
            if ring.iter().any(|p| !(p[0].is_finite() && p[1].is_finite())) {
                return Err(TubeError::EmbeddingInvalid(format!("non-finite section at s = {s}")));
            }
            diam = diam.max(ring_diameter(&ring));
            let kappa = self.frenet.curvature[i];
            for (j, p) in ring.iter().enumerate() {
                if 1.0 - kappa * p[0] <= 0.0 {
                    return Err(TubeError::EmbeddingInvalid(format!(
                        "Jacobian 1 - kappa*mu = {} at s = {s}",
                        1.0 - kappa * p[0]
                    )));
                }
                let phi = 2.0 * PI * j as f64 / n_phi as f64;
                let d = self.sections.d_phi(s, phi);
                if d[0].hypot(d[1]) <= 0.0 {
                    return Err(TubeError::EmbeddingInvalid(format!("degenerate section at s = {s}")));
                }
                // star-shaped about the origin: the boundary turns positively around it
                if p[0] * d[1] - p[1] * d[0] <= 0.0 {
                    return Err(TubeError::EmbeddingInvalid(format!(
                        "section is not star-shaped about the core at s = {s}"
                    )));
                }
            }
        }
        if diam >= self.reach {
            return Err(TubeError::EmbeddingInvalid(format!(
                "section diameter {diam} is not below the reach {}",
                self.reach
            )));
        }
        Ok(())
    }

    /// Overrides the number of boundary samples per cross-section.
    pub fn with_n_phi(mut self, n_phi: usize) -> Self {
        self.n_phi = n_phi.max(8);
        self
    }

    pub fn curve(&self) -> &SampledCurve {
        &self.curve
    }

    pub fn frenet(&self) -> &FrenetData {
        &self.frenet
    }

    pub fn sections(&self) -> &dyn SectionFamily {
        self.sections.as_ref()
    }

    pub fn kind(&self) -> TubeKind {
        self.kind
    }

    pub fn n_phi(&self) -> usize {
        self.n_phi
    }

    pub fn length(&self) -> f64 {
        self.curve.length()
    }

    pub fn kappa_plus(&self) -> f64 {
        self.kappa_plus
    }

    pub fn tau_plus(&self) -> f64 {
        self.tau_plus
    }

    pub fn reach(&self) -> f64 {
        self.reach
    }

    /// Rigidly moved and scaled copy: `p -> scale * rotation * p + shift`.
    pub fn transformed(&self, scale: f64, rotation: &nalgebra::Rotation3<f64>, shift: Vec3) -> Result<Self, TubeError> {
        let curve = self.curve.transformed(scale, rotation, shift);
        match self.kind {
            TubeKind::ConstantRadius { radius } => embed_tube(curve, radius * scale),
            TubeKind::Regular => embed_regular(
                curve,
                Arc::new(ScaledSections {
                    inner: self.sections.clone(),
                    scale,
                }),
            ),
        }
        .map(|t| t.with_n_phi(self.n_phi))
    }

    /// Boundary samples `ψ_s(1, φ_j)`, `φ_j = 2πj/n_φ`.
    pub fn section_ring(&self, s: f64) -> Vec<[f64; 2]> {
        (0..self.n_phi)
            .map(|j| self.sections.boundary(s, 2.0 * PI * j as f64 / self.n_phi as f64))
            .collect()
    }

    /// Frenet data at arc length `s` by cubic interpolation between samples.
    pub fn frame_at(&self, s: f64) -> FrameSample {
        let n = self.curve.len();
        let u = (s / self.curve.spacing()).rem_euclid(n as f64);
        let i = u.floor() as isize;
        let w = lagrange4(u - i as f64);
        let idx = |k: usize| (i - 1 + k as isize).rem_euclid(n as isize) as usize;
        let mut position = Vec3::zeros();
        let mut tangent = Vec3::zeros();
        let mut normal = Vec3::zeros();
        let mut curvature = 0.0;
        let mut torsion = 0.0;
        for (k, wk) in w.iter().enumerate() {
            let j = idx(k);
            position += self.curve.points()[j] * *wk;
            tangent += self.frenet.tangent[j] * *wk;
            normal += self.frenet.normal[j] * *wk;
            curvature += self.frenet.curvature[j] * wk;
            torsion += self.frenet.torsion[j] * wk;
        }
        let tangent = tangent.normalize();
        let normal = (normal - tangent * normal.dot(&tangent)).normalize();
        FrameSample {
            position,
            tangent,
            normal,
            binormal: tangent.cross(&normal),
            curvature,
            torsion,
        }
    }

    /// Embedded point `Ψ(s, ρ, φ)`.
    pub fn embed(&self, s: f64, rho: f64, phi: f64) -> Vec3 {
        let f = self.frame_at(s);
        let b = self.sections.boundary(s, phi);
        f.position + (f.normal * b[0] + f.binormal * b[1]) * rho
    }

    /// Embedded point at core sample `i` (no interpolation).
    pub fn embed_at_sample(&self, i: usize, rho: f64, phi: f64) -> Vec3 {
        let s = self.curve.arclength_at(i);
        let b = self.sections.boundary(s, phi);
        self.curve.points()[i] + (self.frenet.normal[i] * b[0] + self.frenet.binormal[i] * b[1]) * rho
    }

    /// Tangent vectors `(∂_sΨ, ∂_φΨ)` of the boundary surface `ρ = 1`.
    pub fn boundary_tangents(&self, s: f64, phi: f64) -> (Vec3, Vec3) {
        let f = self.frame_at(s);
        let [mu, nu] = self.sections.boundary(s, phi);
        let [mu_s, nu_s] = self.sections.d_s(s, phi);
        let [mu_p, nu_p] = self.sections.d_phi(s, phi);
        let ds = f.tangent * (1.0 - f.curvature * mu)
            + f.normal * (mu_s - f.torsion * nu)
            + f.binormal * (nu_s + f.torsion * mu);
        let dphi = f.normal * mu_p + f.binormal * nu_p;
        (ds, dphi)
    }

    /// First fundamental form `[[G_ss, G_sφ], [G_sφ, G_φφ]]` of the boundary at `(s, φ)`.
    pub fn boundary_metric(&self, s: f64, phi: f64) -> [[f64; 2]; 2] {
        let (a, b) = self.boundary_tangents(s, phi);
        [[a.dot(&a), a.dot(&b)], [a.dot(&b), b.dot(&b)]]
    }

    /// `(R_major, axis point, axis direction)` when the core is a planar circle.
    fn circle_core(&self) -> Option<(f64, Vec3, Vec3)> {
        let k = &self.frenet.curvature;
        let (kmin, kmax) = k
            .iter()
            .fold((f64::INFINITY, 0.0_f64), |(a, b), v| (a.min(*v), b.max(*v)));
        if kmax - kmin > 1e-6 * kmax || self.tau_plus > 1e-6 * kmax {
            return None;
        }
        let n = self.curve.len() as f64;
        let centre = self.curve.points().iter().sum::<Vec3>() / n;
        let axis = self.frenet.binormal[0];
        Some((1.0 / kmax, centre, axis))
    }

    /// Distance `d₋` from the symmetry axis when the solid torus is rotationally symmetric
    /// (planar circular core and `s`-independent sections), otherwise `None`.
    pub fn axis_distance(&self) -> Option<f64> {
        let (_, centre, axis) = self.circle_core()?;
        if !self.sections.is_s_independent() {
            return None;
        }
        let mut dmin = f64::INFINITY;
        for i in (0..self.curve.len()).step_by((self.curve.len() / 16).max(1)) {
            for j in 0..self.n_phi {
                let p = self.embed_at_sample(i, 1.0, 2.0 * PI * j as f64 / self.n_phi as f64) - centre;
                dmin = dmin.min((p - axis * p.dot(&axis)).norm());
            }
        }
        Some(dmin)
    }

    /// `(r, R)` when this is the standard torus: disc sections of radius `r` on a circle of radius `R`.
    pub fn standard_torus(&self) -> Option<(f64, f64)> {
        let (big, _, _) = self.circle_core()?;
        self.sections.disc_radius().map(|r| (r, big))
    }
}

fn ring_diameter(ring: &[[f64; 2]]) -> f64 {
    let mut d2: f64 = 0.0;
    for (i, p) in ring.iter().enumerate() {
        for q in &ring[i + 1..] {
            d2 = d2.max((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2));
        }
    }
    d2.sqrt()
}

#[derive(Debug)]
struct ScaledSections {
    inner: Arc<dyn SectionFamily>,
    scale: f64,
}

impl SectionFamily for ScaledSections {
    fn boundary(&self, s: f64, phi: f64) -> [f64; 2] {
        let p = self.inner.boundary(s / self.scale, phi);
        [p[0] * self.scale, p[1] * self.scale]
    }
    fn d_phi(&self, s: f64, phi: f64) -> [f64; 2] {
        let p = self.inner.d_phi(s / self.scale, phi);
        [p[0] * self.scale, p[1] * self.scale]
    }
    fn d_s(&self, s: f64, phi: f64) -> [f64; 2] {
        self.inner.d_s(s / self.scale, phi)
    }
    fn disc_radius(&self) -> Option<f64> {
        self.inner.disc_radius().map(|r| r * self.scale)
    }
    fn is_s_independent(&self) -> bool {
        self.inner.is_s_independent()
    }
}

/// Tube description as read from JSON.
///
/// Accepted forms: `{"curve": .., "radius": R}`, `{"curve": .., "sections": {..}}` and the
/// standard-torus shorthand `{"torus": {"r": .., "R": ..}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeInput {
    #[serde(default)]
    pub curve: Option<CurveInput>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub sections: Option<SectionInput>,
    #[serde(default)]
    pub torus: Option<StandardTorusInput>,
    #[serde(default)]
    pub n_phi: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StandardTorusInput {
    pub r: f64,
    #[serde(rename = "R")]
    pub big_r: f64,
}

impl TubeInput {
    pub fn build(&self) -> Result<TubeSpec, TubeError> {
        let tube = match (&self.torus, &self.curve, self.radius, &self.sections) {
            (Some(t), None, None, None) => {
                let curve = crate::curvegeom::CurveShape::Circle { radius: t.big_r }
                    .sample(crate::curvegeom::DEFAULT_SAMPLES)?;
                embed_tube(curve, t.r)?
            }
            (None, Some(c), Some(r), None) => embed_tube(c.build()?, r)?,
            (None, Some(c), None, Some(sec)) => {
                let curve = c.build()?;
                let family: Arc<dyn SectionFamily> = match *sec {
                    SectionInput::Disc { radius } => Arc::new(Disc { radius }),
                    SectionInput::Ellipse { a, b, twist } => {
                        if !(a > 0.0 && b > 0.0) {
                            return Err(TubeError::Malformed("ellipse axes must be positive".into()));
                        }
                        Arc::new(RotatingEllipse {
                            a,
                            b,
                            twist,
                            length: curve.length(),
                        })
                    }
                };
                embed_regular(curve, family)?
            }
            _ => {
                return Err(TubeError::Malformed(
                    "expected {\"torus\":..}, {\"curve\":..,\"radius\":..} or {\"curve\":..,\"sections\":..}".into(),
                ))
            }
        };
        Ok(match self.n_phi {
            Some(n) => tube.with_n_phi(n),
            None => tube,
        })
    }
}

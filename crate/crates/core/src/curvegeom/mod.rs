//! Discrete differential geometry of closed space curves.
//!
//! A [`SampledCurve`] is a closed curve stored as `n` points equally spaced in arc
//! length. Indexing is cyclic and the endpoint is not duplicated. Derivatives are taken
//! with fourth-order central differences on this uniform grid.

mod frenet;
mod reach;
mod resample;
mod spec;

pub use frenet::{curvature_extrema, frenet, FrenetData};
pub use reach::reach;
pub use resample::{resample_arclength, PeriodicSpline};
pub use spec::{CurveInput, CurveShape, DEFAULT_SAMPLES};

use crate::Vec3;
use thiserror::Error;

/// Smallest admissible number of samples on a curve.
pub const MIN_SAMPLES: usize = 16;

/// Relative tolerance on consecutive sample distances against the arc-length spacing.
pub const SPACING_TOL: f64 = 0.01;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CurveError {
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("curve is not regular: |chi''| = {value:e} below threshold {threshold:e} at sample {index}")]
    NonRegularCurve { index: usize, value: f64, threshold: f64 },
    #[error("samples are not arc-length uniform: gap {gap} vs spacing {spacing} at sample {index}")]
    NotArcLength { index: usize, gap: f64, spacing: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
}

/// Closed curve sampled uniformly in arc length.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    points: Vec<Vec3>,
    length: f64,
}

impl SampledCurve {
    /// Wraps points that are already equally spaced in arc length along a curve of total
    /// length `length`. Consecutive chords must be within 1% of `length / n`.
    pub fn from_uniform(points: Vec<Vec3>, length: f64) -> Result<Self, CurveError> {
        let n = points.len();
        if n < MIN_SAMPLES {
            return Err(CurveError::TooFewPoints {
                needed: MIN_SAMPLES,
                got: n,
            });
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(CurveError::Degenerate(format!("length {length}")));
        }
        let spacing = length / n as f64;
        for i in 0..n {
            let gap = (points[(i + 1) % n] - points[i]).norm();
            if (gap - spacing).abs() > SPACING_TOL * spacing {
                return Err(CurveError::NotArcLength { index: i, gap, spacing });
            }
        }
        Ok(Self { points, length })
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Total length `L` of the closed curve.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Arc-length spacing `L / n`.
    pub fn spacing(&self) -> f64 {
        self.length / self.points.len() as f64
    }

    /// Sample `i` with cyclic indexing.
    pub fn point(&self, i: isize) -> Vec3 {
        let n = self.points.len() as isize;
        self.points[i.rem_euclid(n) as usize]
    }

    /// Arc-length coordinate of sample `i`.
    pub fn arclength_at(&self, i: usize) -> f64 {
        i as f64 * self.spacing()
    }

    /// Applies an affine map `p -> a * rotation * p + shift`, scaling the length by `|a|`.
    pub fn transformed(&self, scale: f64, rotation: &nalgebra::Rotation3<f64>, shift: Vec3) -> Self {
        Self {
            points: self.points.iter().map(|p| rotation * (p * scale) + shift).collect(),
            length: self.length * scale.abs(),
        }
    }

    pub fn scaled(&self, scale: f64) -> Self {
        self.transformed(scale, &nalgebra::Rotation3::identity(), Vec3::zeros())
    }

    /// Position at an arbitrary arc-length `s` by cubic interpolation between samples.
    pub fn position_at(&self, s: f64) -> Vec3 {
        let ds = self.spacing();
        let u = (s / ds).rem_euclid(self.points.len() as f64);
        let i = u.floor() as isize;
        let w = lagrange4(u - i as f64);
        (0..4).map(|k| self.point(i - 1 + k as isize) * w[k]).sum()
    }
}

/// Weights of the cubic Lagrange interpolant through nodes `-1, 0, 1, 2`, evaluated at `t`.
pub(crate) fn lagrange4(t: f64) -> [f64; 4] {
    [
        -t * (t - 1.0) * (t - 2.0) / 6.0,
        (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0,
        -(t + 1.0) * t * (t - 2.0) / 2.0,
        (t + 1.0) * t * (t - 1.0) / 6.0,
    ]
}

//! Field lines of tangent vector fields on the boundary of a solid torus.
//!
//! The boundary is charted by `(s, φ) ↦ Ψ(s, 1, φ)` with `s` the arc length of the core
//! (period `L`) and `φ` the section angle (period `2π`). A [`SurfaceField`] gives the chart
//! components `(f_s, f_φ)` of a vector field; traces are integrated in the universal cover
//! so that winding is read off the lifted coordinates directly.

mod expr;
mod trace;
mod winding;

pub use expr::Expr;
pub use trace::{poloidal_turn_markers, trace, FieldLinePath};
pub use winding::{
    length_inequality_check, pbar_qbar, pbar_qbar_with, winding_limits, HarmonicBasis, LengthMargins, SurfaceAverages,
    WindingEstimate, MIN_MARKERS,
};

use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SurfaceFlowError {
    #[error("cannot parse field expression: {0}")]
    Parse(String),
    #[error("step {step} moved the chart point by (Δs, Δφ) = ({ds}, {dphi}), over a tenth of a period")]
    StepTooLarge { step: usize, ds: f64, dphi: f64 },
    #[error("field vanishes at t = {t} (s = {s}, phi = {phi})")]
    FieldVanished { t: f64, s: f64, phi: f64 },
    #[error("need at least {needed} markers, got {got}")]
    TooFewMarkers { needed: usize, got: usize },
    #[error("markers must be strictly increasing and inside the traced time range")]
    BadMarkers,
    #[error("the angle advanced by {advance} only, less than one poloidal turn")]
    NoTurns { advance: f64 },
    #[error("exact harmonic basis needs a standard torus")]
    NotAxisymmetric,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

type Component = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Chart components `(f_s, f_φ)` of a vector field tangent to the boundary.
#[derive(Clone)]
pub struct SurfaceField {
    fs: Component,
    fphi: Component,
}

impl fmt::Debug for SurfaceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceField").finish_non_exhaustive()
    }
}

impl SurfaceField {
    pub fn new(
        fs: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
        fphi: impl Fn(f64, f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            fs: Arc::new(fs),
            fphi: Arc::new(fphi),
        }
    }

    /// Constant chart components.
    pub fn constant(fs: f64, fphi: f64) -> Self {
        Self::new(move |_, _| fs, move |_, _| fphi)
    }

    /// Parses both components with the [`Expr`] grammar.
    pub fn parse(fs: &str, fphi: &str) -> Result<Self, SurfaceFlowError> {
        let a = Expr::parse(fs)?;
        let b = Expr::parse(fphi)?;
        Ok(Self::new(move |s, p| a.eval(s, p), move |s, p| b.eval(s, p)))
    }

    pub fn eval(&self, s: f64, phi: f64) -> (f64, f64) {
        ((self.fs)(s, phi), (self.fphi)(s, phi))
    }

    /// The field multiplied by the scalar function `mu`.
    pub fn rescaled(&self, mu: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let mu = Arc::new(mu);
        let (fs, fphi) = (self.fs.clone(), self.fphi.clone());
        let mu2 = mu.clone();
        Self::new(move |s, p| mu(s, p) * fs(s, p), move |s, p| mu2(s, p) * fphi(s, p))
    }
}

//! Voxel discretisation of the Biot-Savart operator on a bounded domain.
//!
//! Fields live at the centres of the cubical cells of a [`VoxelDomain`]. The operator is
//! a midpoint sum with the singular self-cell term dropped, which keeps
//! `⟨A, BS B⟩ = ⟨BS A, B⟩` exact. Divergence-free projection, the modified operator
//! `BS′ = π ∘ BS` and power iteration for its top eigenvalue build on that.

mod checks;
mod domain;
mod operators;
mod spectrum;

pub use checks::{
    axisym_gamma, basis_pairing_check, basis_pairing_check_with, bochner_check, bochner_check_at_distance, curl,
    curl_bs_defect, PairingCheck, PairingOptions,
};
pub use domain::{voxelize, DomainShape, DomainSpec, VoxelDomain};
pub use operators::{
    biot_savart, divergence, gradient, helicity, leray_project, leray_project_with, modified_bs, GridField,
    ProjectionStats, PROJECTION_TOL,
};
pub use spectrum::{
    lambda_plus, lambda_plus_with, random_smooth_field, PowerOptions, SpectralEstimate, MIN_SPECTRAL_CELLS,
};

use crate::torusgeom::TubeError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BiotSavartError {
    #[error("no lattice point of spacing {h} lies inside the domain")]
    EmptyDomain { h: f64 },
    #[error("cell {index} is at distance {distance} from the symmetry axis, below one cell")]
    AxisIntersection { index: usize, distance: f64 },
    #[error("projection solver stopped after {iterations} iterations at relative residual {:e}", .residuals.last().copied().unwrap_or(f64::NAN))]
    SolverDiverged { iterations: usize, residuals: Vec<f64> },
    #[error("power iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("need at least {needed} cells, got {got}")]
    TooFewCells { needed: usize, got: usize },
    #[error("domain is not a standard torus")]
    NotTorus,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Tube(#[from] TubeError),
}

//! Numerical toolkit for the helicity shape-optimisation problem on solid tori.
//!
//! The crate is split along the natural seams of the problem:
//!
//! - [`curvegeom`]: closed space curves, Frenet frames, curvature, torsion and reach.
//! - [`torusgeom`]: tubular neighbourhoods and regular solid tori built on a core curve,
//!   their geometric constants, volume and the curl-free comparison field.
//! - [`certificates`]: the non-optimality inequalities and eigenvalue bounds.
//! - [`biotsavart`]: voxel discretisation of the Biot-Savart operator, helicity, the
//!   divergence-free projection and the largest positive eigenvalue.
//! - [`surfaceflow`]: field-line tracing on torus boundaries and winding averages.

pub mod biotsavart;
pub mod certificates;
pub mod curvegeom;
pub mod quadrature;
pub mod surfaceflow;
pub mod torusgeom;

/// Three-vector used throughout the crate.
pub type Vec3 = nalgebra::Vector3<f64>;

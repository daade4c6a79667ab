use super::{leray_project, modified_bs, BiotSavartError, GridField, VoxelDomain};
use crate::certificates::{helicity_energy_coefficient, EnergyBound};
use crate::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Smallest domain accepted by [`lambda_plus`].
pub const MIN_SPECTRAL_CELLS: usize = 500;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub lambda_plus: f64,
    pub iterations: usize,
    /// `‖BS′v − λv‖ / ‖v‖` at the final iterate.
    pub residual: f64,
    pub shift: f64,
    pub cells: usize,
    pub h: f64,
    pub rayleigh_history: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Iterate on `−BS′` and report the magnitude of the most negative eigenvalue.
    pub negative: bool,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            tol: 1e-4,
            max_iter: 2000,
            seed: 0,
            negative: false,
        }
    }
}

/// Random smooth field: each component a polynomial of degree `degree` in the scaled
/// coordinates, coefficients uniform in `[−1, 1]`.
pub fn random_smooth_field(dom: &VoxelDomain, seed: u64, degree: u32) -> GridField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut exps = Vec::new();
    for a in 0..=degree {
        for b in 0..=degree - a {
            for c in 0..=degree - a - b {
                exps.push([a as i32, b as i32, c as i32]);
            }
        }
    }
    let coeffs: Vec<Vec3> = exps
        .iter()
        .map(|_| {
            Vec3::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
        })
        .collect();
    let n = dom.len() as f64;
    let centre = dom.centers().iter().sum::<Vec3>() / n;
    let scale = dom
        .centers()
        .iter()
        .map(|p| (p - centre).amax())
        .fold(0.0, f64::max)
        .max(dom.h());
    GridField::from_fn(dom, |p| {
        let q = (p - centre) / scale;
        exps.iter()
            .zip(&coeffs)
            .map(|(e, c)| c * (q.x.powi(e[0]) * q.y.powi(e[1]) * q.z.powi(e[2])))
            .sum()
    })
}

/// Largest positive eigenvalue of `BS′` by power iteration on `BS′ + sI` with the shift
/// `s = (πV/16)^{1/3}`, `V` the voxel volume.
pub fn lambda_plus(dom: &VoxelDomain, tol: f64) -> Result<SpectralEstimate, BiotSavartError> {
    lambda_plus_with(
        dom,
        &PowerOptions {
            tol,
            ..Default::default()
        },
    )
    .map(|(e, _)| e)
}

/// Like [`lambda_plus`], also returning the final normalised iterate.
pub fn lambda_plus_with(
    dom: &VoxelDomain,
    opts: &PowerOptions,
) -> Result<(SpectralEstimate, GridField), BiotSavartError> {
    if dom.len() < MIN_SPECTRAL_CELLS {
        return Err(BiotSavartError::TooFewCells {
            needed: MIN_SPECTRAL_CELLS,
            got: dom.len(),
        });
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(BiotSavartError::InvalidParameter(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    let shift = helicity_energy_coefficient(dom.discrete_volume(), EnergyBound::Sharp)
        .map_err(|e| BiotSavartError::InvalidParameter(e.to_string()))?;
    let sign = if opts.negative { -1.0 } else { 1.0 };
    let mut v = leray_project(dom, &random_smooth_field(dom, opts.seed, 2))?;
    let norm = dom.norm(&v);
    if norm == 0.0 {
        return Err(BiotSavartError::InvalidParameter("start field projects to zero".into()));
    }
    v = v.scaled(1.0 / norm);
    let mut history = Vec::new();
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iter {
        let w = modified_bs(dom, &v)?.scaled(sign);
        let lambda = dom.inner(&v, &w);
        let mut r = w.clone();
        r.axpy(-lambda, &v);
        residual = dom.norm(&r);
        history.push(lambda);
        if residual <= opts.tol {
            let est = SpectralEstimate {
                lambda_plus: lambda,
                iterations: it,
                residual,
                shift,
                cells: dom.len(),
                h: dom.h(),
                rayleigh_history: history,
            };
            return Ok((est, v));
        }
        let mut next = w;
        next.axpy(shift, &v);
        let n = dom.norm(&next);
        v = next.scaled(1.0 / n);
    }
    Err(BiotSavartError::NoConvergence {
        iterations: opts.max_iter,
        residual,
    })
}

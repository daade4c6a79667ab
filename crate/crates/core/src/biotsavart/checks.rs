use super::operators::Sources;
use super::{biot_savart, BiotSavartError, DomainShape, GridField, VoxelDomain};
use crate::Vec3;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Cell-centred curl: central differences where both neighbours exist, one-sided where
/// only one does.
pub fn curl(dom: &VoxelDomain, f: &GridField) -> GridField {
    let h = dom.h();
    let v = f.values();
    GridField::from_values(
        (0..dom.len())
            .map(|i| {
                // jac[d] = ∂_d F
                let jac: [Vec3; 3] = [0, 1, 2].map(|d| match (dom.neighbor(i, 2 * d), dom.neighbor(i, 2 * d + 1)) {
                    (Some(p), Some(m)) => (v[p] - v[m]) / (2.0 * h),
                    (Some(p), None) => (v[p] - v[i]) / h,
                    (None, Some(m)) => (v[i] - v[m]) / h,
                    (None, None) => Vec3::zeros(),
                });
                Vec3::new(jac[1].z - jac[2].y, jac[2].x - jac[0].z, jac[0].y - jac[1].x)
            })
            .collect(),
    )
}

/// `sup |curl(BS(B)) − B|` over cells of depth at least `min_depth`.
pub fn curl_bs_defect(dom: &VoxelDomain, b: &GridField, min_depth: u8) -> f64 {
    let c = curl(dom, &biot_savart(dom, b));
    dom.interior_cells(min_depth)
        .into_iter()
        .map(|i| (c.values()[i] - b.values()[i]).norm())
        .fold(0.0, f64::max)
}

/// `Γ = Y/|Y|²` with `Y = (−y, x, 0)`, sampled at the cell centres.
pub fn axisym_gamma(dom: &VoxelDomain) -> Result<GridField, BiotSavartError> {
    let h2 = dom.h() * dom.h();
    for (index, p) in dom.centers().iter().enumerate() {
        let d2 = p.x * p.x + p.y * p.y;
        if d2 < h2 {
            return Err(BiotSavartError::AxisIntersection {
                index,
                distance: d2.sqrt(),
            });
        }
    }
    Ok(GridField::from_fn(dom, gamma_at))
}

fn gamma_at(p: Vec3) -> Vec3 {
    Vec3::new(-p.y, p.x, 0.0) / (p.x * p.x + p.y * p.y)
}

/// `max |Δ(|Γ|²/2) − Σᵢⱼ (∂ᵢΓʲ)²|` over cells of depth at least 3, with the 7-point
/// Laplacian and central first differences.
pub fn bochner_check(dom: &VoxelDomain, gamma: &GridField) -> Result<f64, BiotSavartError> {
    bochner_over(dom, gamma, dom.interior_cells(3))
}

/// As [`bochner_check`] over the cells at distance at least `d` from the boundary. A fixed
/// `d` keeps the sampled region the same under refinement.
pub fn bochner_check_at_distance(dom: &VoxelDomain, gamma: &GridField, d: f64) -> Result<f64, BiotSavartError> {
    let cells = dom
        .cells_at_distance(d)
        .into_iter()
        .filter(|&c| dom.depth(c) >= 1)
        .collect();
    bochner_over(dom, gamma, cells)
}

fn bochner_over(dom: &VoxelDomain, gamma: &GridField, cells: Vec<usize>) -> Result<f64, BiotSavartError> {
    if cells.is_empty() {
        return Err(BiotSavartError::TooFewCells { needed: 1, got: 0 });
    }
    let h = dom.h();
    let g = gamma.values();
    let u: Vec<f64> = g.iter().map(|v| 0.5 * v.norm_squared()).collect();
    let defect = cells
        .into_iter()
        .map(|i| {
            let mut lap = 0.0;
            let mut grad2 = 0.0;
            for d in 0..3 {
                let p = dom.neighbor(i, 2 * d).expect("interior cell");
                let m = dom.neighbor(i, 2 * d + 1).expect("interior cell");
                lap += (u[p] + u[m] - 2.0 * u[i]) / (h * h);
                grad2 += ((g[p] - g[m]) / (2.0 * h)).norm_squared();
            }
            (lap - grad2).abs()
        })
        .fold(0.0, f64::max);
    Ok(defect)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingOptions {
    /// Surface nodes around the tube; defaults to `⌈2πr/h⌉`.
    pub n_theta: Option<usize>,
    /// Surface nodes around the axis; defaults to `⌈2π(R + r)/h⌉`.
    pub n_phi: Option<usize>,
    /// Sub-cubes per axis for cells near a surface node.
    pub subdivisions: usize,
    /// Cells within this many `h` (max norm) of a node use sub-cubes.
    pub near: f64,
}

impl Default for PairingOptions {
    fn default() -> Self {
        Self {
            n_theta: None,
            n_phi: None,
            subdivisions: 4,
            near: 2.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingCheck {
    /// `∮ (BS(Γ) × Γ)·𝒩 dσ` over the exact torus surface.
    pub flux: f64,
    /// `‖Γ‖²` on the voxel domain.
    pub norm_sq: f64,
    /// `flux / norm_sq − 1`, i.e. the defect for unit-normalised `Γ`.
    pub defect: f64,
}

/// Surface form of the pairing between the harmonic field `Γ = Y/|Y|²` and its
/// Biot-Savart image on a standard torus.
///
/// Because `curl BS(Γ) = Γ` inside and `curl Γ = 0`, the divergence theorem gives
/// `∮ (BS(Γ) × Γ)·𝒩 = ‖Γ‖²`.
pub fn basis_pairing_check(dom: &VoxelDomain) -> Result<PairingCheck, BiotSavartError> {
    basis_pairing_check_with(dom, &PairingOptions::default(), None)
}

/// As [`basis_pairing_check`]; `extra` is added to `BS(Γ)` at every surface node.
pub fn basis_pairing_check_with(
    dom: &VoxelDomain,
    opts: &PairingOptions,
    extra: Option<&(dyn Fn(Vec3) -> Vec3 + Sync)>,
) -> Result<PairingCheck, BiotSavartError> {
    let (r, big_r) = match dom.shape() {
        DomainShape::StandardTorus { r, big_r } => (*r, *big_r),
        _ => return Err(BiotSavartError::NotTorus),
    };
    let gamma = axisym_gamma(dom)?;
    let h = dom.h();
    let h3 = h.powi(3);
    let n_theta = opts.n_theta.unwrap_or((2.0 * PI * r / h).ceil() as usize).max(8);
    let n_phi = opts
        .n_phi
        .unwrap_or((2.0 * PI * (big_r + r) / h).ceil() as usize)
        .max(8);
    let weights: Vec<Vec3> = gamma.values().iter().map(|g| g * h3).collect();
    let src = Sources::new(dom.centers(), &weights);
    let m = opts.subdivisions.max(1);
    let reach = opts.near.ceil() as i32;
    let nodes: Vec<(usize, usize)> = (0..n_theta).flat_map(|i| (0..n_phi).map(move |j| (i, j))).collect();
    let dth = 2.0 * PI / n_theta as f64;
    let dph = 2.0 * PI / n_phi as f64;
    let flux: f64 = nodes
        .par_iter()
        .map(|&(i, j)| {
            let th = (i as f64 + 0.5) * dth;
            let ph = (j as f64 + 0.5) * dph;
            let w = big_r + r * th.cos();
            let p = Vec3::new(w * ph.cos(), w * ph.sin(), r * th.sin());
            let normal = Vec3::new(th.cos() * ph.cos(), th.cos() * ph.sin(), th.sin());
            let mut bs = src.field_at(p);
            // replace the midpoint contribution of nearby cells by sub-cube cubature
            let base = [0, 1, 2].map(|d| (p[d] / h).round() as i32);
            for a in -reach..=reach {
                for b in -reach..=reach {
                    for c in -reach..=reach {
                        let Some(cell) = dom.cell_at([base[0] + a, base[1] + b, base[2] + c]) else {
                            continue;
                        };
                        let centre = dom.centers()[cell];
                        if (p - centre).amax() > opts.near * h {
                            continue;
                        }
                        let d = p - centre;
                        let r2 = d.norm_squared();
                        if r2 > 0.0 {
                            bs -= weights[cell].cross(&d) / (r2 * r2.sqrt());
                        }
                        let sub_w = h3 / (m * m * m) as f64;
                        for u in 0..m {
                            for v in 0..m {
                                for k in 0..m {
                                    let off = Vec3::new(u as f64, v as f64, k as f64).add_scalar(0.5) / m as f64;
                                    let q = centre + (off.add_scalar(-0.5)) * h;
                                    let d = p - q;
                                    let r2 = d.norm_squared();
                                    if r2 > 0.0 {
                                        bs += (gamma_at(q) * sub_w).cross(&d) / (r2 * r2.sqrt());
                                    }
                                }
                            }
                        }
                    }
                }
            }
            let mut field = bs / (4.0 * PI);
            if let Some(f) = extra {
                field += f(p);
            }
            let g = Vec3::new(-ph.sin(), ph.cos(), 0.0) / w;
            field.cross(&g).dot(&normal) * r * w * dth * dph
        })
        .sum();
    let norm_sq = dom.inner(&gamma, &gamma);
    Ok(PairingCheck {
        flux,
        norm_sq,
        defect: flux / norm_sq - 1.0,
    })
}

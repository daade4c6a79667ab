use super::{BiotSavartError, VoxelDomain};
use crate::Vec3;
use rayon::prelude::*;
use std::f64::consts::PI;

/// Default relative residual for the projection solve.
pub const PROJECTION_TOL: f64 = 1e-10;

/// One vector per cell of a [`VoxelDomain`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    values: Vec<Vec3>,
}

impl GridField {
    pub fn zeros(n: usize) -> Self {
        Self {
            values: vec![Vec3::zeros(); n],
        }
    }

    pub fn from_values(values: Vec<Vec3>) -> Self {
        Self { values }
    }

    /// Samples `f` at every cell centre.
    pub fn from_fn(dom: &VoxelDomain, f: impl Fn(Vec3) -> Vec3) -> Self {
        Self {
            values: dom.centers().iter().map(|p| f(*p)).collect(),
        }
    }

    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    /// `self += a·x`.
    pub fn axpy(&mut self, a: f64, x: &GridField) {
        for (v, w) in self.values.iter_mut().zip(&x.values) {
            *v += w * a;
        }
    }

    pub fn sub(&self, other: &GridField) -> Self {
        Self {
            values: self.values.iter().zip(&other.values).map(|(a, b)| a - b).collect(),
        }
    }

    /// Largest cell-wise magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl VoxelDomain {
    /// `L²` inner product `h³ Σ aᵢ·bᵢ`.
    pub fn inner(&self, a: &GridField, b: &GridField) -> f64 {
        self.h().powi(3) * a.values.iter().zip(&b.values).map(|(x, y)| x.dot(y)).sum::<f64>()
    }

    pub fn norm(&self, a: &GridField) -> f64 {
        self.inner(a, a).sqrt()
    }

    /// Root mean square of the cell magnitudes.
    pub fn rms(&self, a: &GridField) -> f64 {
        (a.values.iter().map(|v| v.norm_squared()).sum::<f64>() / a.len().max(1) as f64).sqrt()
    }
}

const LANES: usize = 4;

/// Point sources `wⱼ` at `yⱼ`, stored component-wise for the summation loop.
pub(crate) struct Sources {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
    wz: Vec<f64>,
}

impl Sources {
    pub(crate) fn new(points: &[Vec3], weights: &[Vec3]) -> Self {
        assert_eq!(points.len(), weights.len());
        let col = |v: &[Vec3], d: usize| v.iter().map(|p| p[d]).collect::<Vec<f64>>();
        Self {
            x: col(points, 0),
            y: col(points, 1),
            z: col(points, 2),
            wx: col(weights, 0),
            wy: col(weights, 1),
            wz: col(weights, 2),
        }
    }

    /// `Σⱼ wⱼ × (t − yⱼ)/|t − yⱼ|³`, skipping sources that coincide with `t`.
    pub(crate) fn field_at(&self, t: Vec3) -> Vec3 {
        let mut ax = [0.0; LANES];
        let mut ay = [0.0; LANES];
        let mut az = [0.0; LANES];
        let chunks = self
            .x
            .chunks_exact(LANES)
            .zip(self.y.chunks_exact(LANES))
            .zip(self.z.chunks_exact(LANES))
            .zip(self.wx.chunks_exact(LANES))
            .zip(self.wy.chunks_exact(LANES))
            .zip(self.wz.chunks_exact(LANES));
        for (((((x, y), z), wx), wy), wz) in chunks {
            for l in 0..LANES {
                let dx = t.x - x[l];
                let dy = t.y - y[l];
                let dz = t.z - z[l];
                let r2 = dx * dx + dy * dy + dz * dz;
                let inv = if r2 > 0.0 { 1.0 / (r2 * r2.sqrt()) } else { 0.0 };
                ax[l] += (wy[l] * dz - wz[l] * dy) * inv;
                ay[l] += (wz[l] * dx - wx[l] * dz) * inv;
                az[l] += (wx[l] * dy - wy[l] * dx) * inv;
            }
        }
        let mut out = Vec3::new(ax.iter().sum(), ay.iter().sum(), az.iter().sum());
        let tail = self.x.len() - self.x.len() % LANES;
        for j in tail..self.x.len() {
            let d = t - Vec3::new(self.x[j], self.y[j], self.z[j]);
            let r2 = d.norm_squared();
            if r2 > 0.0 {
                out += Vec3::new(self.wx[j], self.wy[j], self.wz[j]).cross(&d) / (r2 * r2.sqrt());
            }
        }
        out
    }
}

/// Midpoint-rule Biot-Savart operator with the self-cell term set to zero:
/// `BS(B)ᵢ = h³/(4π) Σ_{j≠i} Bⱼ × (xᵢ − xⱼ)/|xᵢ − xⱼ|³`.
pub fn biot_savart(dom: &VoxelDomain, b: &GridField) -> GridField {
    let h3 = dom.h().powi(3);
    let weights: Vec<Vec3> = b.values().iter().map(|v| v * h3).collect();
    let src = Sources::new(dom.centers(), &weights);
    let c = 1.0 / (4.0 * PI);
    GridField::from_values(dom.centers().par_iter().map(|t| src.field_at(*t) * c).collect())
}

/// Helicity `⟨B, BS(B)⟩`.
pub fn helicity(dom: &VoxelDomain, b: &GridField) -> f64 {
    dom.inner(b, &biot_savart(dom, b))
}

/// Cell gradient as the average of the two face differences in each direction; a face
/// towards a missing neighbour contributes zero.
pub fn gradient(dom: &VoxelDomain, phi: &[f64]) -> GridField {
    let inv = 0.5 / dom.h();
    let nb = dom.neighbor_table();
    GridField::from_values(
        (0..dom.len())
            .map(|i| {
                let mut g = Vec3::zeros();
                for d in 0..3 {
                    let (p, m) = (nb[i][2 * d], nb[i][2 * d + 1]);
                    let mut v = 0.0;
                    if p != u32::MAX {
                        v += phi[p as usize] - phi[i];
                    }
                    if m != u32::MAX {
                        v += phi[i] - phi[m as usize];
                    }
                    g[d] = v * inv;
                }
                g
            })
            .collect(),
    )
}

/// Divergence from face fluxes `(Xᵢ + Xⱼ)/2 · e`; boundary faces carry no flux. This is
/// the negative adjoint of [`gradient`].
pub fn divergence(dom: &VoxelDomain, f: &GridField) -> Vec<f64> {
    let inv = 0.5 / dom.h();
    let nb = dom.neighbor_table();
    let v = f.values();
    (0..dom.len())
        .map(|i| {
            let mut s = 0.0;
            for d in 0..3 {
                let (p, m) = (nb[i][2 * d], nb[i][2 * d + 1]);
                if p != u32::MAX {
                    s += v[p as usize][d] + v[i][d];
                }
                if m != u32::MAX {
                    s -= v[i][d] + v[m as usize][d];
                }
            }
            s * inv
        })
        .collect()
}

/// Outcome of a projection solve.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// `L²`-orthogonal projection onto discretely divergence-free fields: `X − Gφ` with
/// `GᵀGφ = GᵀX`, solved by conjugate gradients with a mean-zero gauge.
pub fn leray_project(dom: &VoxelDomain, x: &GridField) -> Result<GridField, BiotSavartError> {
    leray_project_with(dom, x, PROJECTION_TOL).map(|(f, _)| f)
}

pub fn leray_project_with(
    dom: &VoxelDomain,
    x: &GridField,
    tol: f64,
) -> Result<(GridField, ProjectionStats), BiotSavartError> {
    let n = dom.len();
    let apply = |phi: &[f64]| -> Vec<f64> { divergence(dom, &gradient(dom, phi)).iter().map(|v| -v).collect() };
    let mut b: Vec<f64> = divergence(dom, x).iter().map(|v| -v).collect();
    let mean = b.iter().sum::<f64>() / n as f64;
    b.iter_mut().for_each(|v| *v -= mean);
    let dot = |a: &[f64], c: &[f64]| a.iter().zip(c).map(|(p, q)| p * q).sum::<f64>();
    let bnorm = dot(&b, &b).sqrt();
    if bnorm == 0.0 {
        return Ok((
            x.clone(),
            ProjectionStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        ));
    }
    let mut phi = vec![0.0; n];
    let mut r = b.clone();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = (10 * n).max(1000);
    let mut history = Vec::new();
    let mut iterations = 0;
    while (rr.sqrt() / bnorm) > tol {
        if iterations >= max_iter || !rr.is_finite() {
            return Err(BiotSavartError::SolverDiverged {
                iterations,
                residuals: history,
            });
        }
        let ap = apply(&p);
        let alpha = rr / dot(&p, &ap);
        for i in 0..n {
            phi[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        iterations += 1;
        history.push(rr.sqrt() / bnorm);
    }
    let mean = phi.iter().sum::<f64>() / n as f64;
    phi.iter_mut().for_each(|v| *v -= mean);
    let g = gradient(dom, &phi);
    Ok((
        x.sub(&g),
        ProjectionStats {
            iterations,
            relative_residual: rr.sqrt() / bnorm,
        },
    ))
}

/// `BS′ = π ∘ BS`.
pub fn modified_bs(dom: &VoxelDomain, b: &GridField) -> Result<GridField, BiotSavartError> {
    leray_project(dom, &biot_savart(dom, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::biotsavart::{voxelize, DomainShape};

    #[test]
    fn divergence_is_negative_adjoint_of_gradient() {
        let dom = voxelize(DomainShape::StandardTorus { r: 1.0, big_r: 2.5 }, 0.3).unwrap();
        let phi: Vec<f64> = dom.centers().iter().map(|p| (p.x * 1.3).sin() + p.z * p.y).collect();
        let x = GridField::from_fn(&dom, |p| Vec3::new(p.y.cos(), p.x * p.z, 1.0 + p.x));
        let lhs: f64 = gradient(&dom, &phi)
            .values()
            .iter()
            .zip(x.values())
            .map(|(a, b)| a.dot(b))
            .sum();
        let rhs: f64 = divergence(&dom, &x).iter().zip(&phi).map(|(a, b)| a * b).sum();
        assert!((lhs + rhs).abs() < 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn lane_sum_matches_scalar_sum() {
        let pts: Vec<Vec3> = (0..23)
            .map(|i| Vec3::new(i as f64, (i * i % 7) as f64, 0.5 * i as f64))
            .collect();
        let w: Vec<Vec3> = (0..23).map(|i| Vec3::new(1.0, -(i as f64), 0.25)).collect();
        let src = Sources::new(&pts, &w);
        let t = Vec3::new(0.3, -1.0, 2.0);
        let direct: Vec3 = pts
            .iter()
            .zip(&w)
            .map(|(p, w)| {
                let d = t - p;
                w.cross(&d) / d.norm().powi(3)
            })
            .sum();
        assert!((src.field_at(t) - direct).norm() < 1e-13);
        // a target on a source skips it
        let on = src.field_at(pts[4]);
        assert!(on.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let dom = voxelize(DomainShape::Ball { r: 1.0 }, 0.25).unwrap();
        let z = GridField::zeros(dom.len());
        assert_eq!(biot_savart(&dom, &z), z);
        assert_eq!(helicity(&dom, &z), 0.0);
        assert_eq!(modified_bs(&dom, &z).unwrap(), z);
    }
}

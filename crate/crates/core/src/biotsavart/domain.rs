use super::BiotSavartError;
use crate::torusgeom::{volume, TubeInput, TubeSpec};
use crate::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Domain description as read from JSON, e.g. `{"ball":{"r":1}}` or `{"torus":{"r":1,"R":3}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Ball {
        r: f64,
    },
    Torus {
        r: f64,
        #[serde(rename = "R")]
        big_r: f64,
    },
    Tube(TubeInput),
}

impl DomainSpec {
    pub fn shape(&self) -> Result<DomainShape, BiotSavartError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(BiotSavartError::InvalidParameter(format!(
                    "{name} must be positive, got {v}"
                )))
            }
        };
        match self {
            DomainSpec::Ball { r } => {
                positive("r", *r)?;
                Ok(DomainShape::Ball { r: *r })
            }
            DomainSpec::Torus { r, big_r } => {
                positive("r", *r)?;
                positive("R", *big_r)?;
                if r >= big_r {
                    return Err(BiotSavartError::InvalidParameter(format!(
                        "torus needs r < R, got r = {r}, R = {big_r}"
                    )));
                }
                Ok(DomainShape::StandardTorus { r: *r, big_r: *big_r })
            }
            DomainSpec::Tube(t) => Ok(DomainShape::tube(t.build()?)),
        }
    }
}

/// Region of space that a [`VoxelDomain`] discretises.
#[derive(Debug, Clone)]
pub enum DomainShape {
    Ball {
        r: f64,
    },
    /// `(√(x²+y²) − R)² + z² ≤ r²`.
    StandardTorus {
        r: f64,
        big_r: f64,
    },
    Tube(Arc<TubeRegion>),
}

/// A [`TubeSpec`] with the data needed for fast point-in-tube queries.
#[derive(Debug, Clone)]
pub struct TubeRegion {
    spec: TubeSpec,
    extent: f64,
}

impl TubeRegion {
    pub fn spec(&self) -> &TubeSpec {
        &self.spec
    }
}

impl DomainShape {
    pub fn tube(spec: TubeSpec) -> Self {
        let extent = section_extent(&spec);
        DomainShape::Tube(Arc::new(TubeRegion { spec, extent }))
    }

    pub fn contains(&self, p: Vec3) -> bool {
        match self {
            DomainShape::Ball { r } => p.norm_squared() <= r * r,
            DomainShape::StandardTorus { r, big_r } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt();
                (rho - big_r).powi(2) + p.z * p.z <= r * r
            }
            DomainShape::Tube(t) => tube_contains(t, p),
        }
    }

    /// Distance from an inside point to the boundary, when available in closed form.
    pub fn boundary_distance(&self, p: Vec3) -> Option<f64> {
        match self {
            DomainShape::Ball { r } => Some(r - p.norm()),
            DomainShape::StandardTorus { r, big_r } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt();
                Some(r - (rho - big_r).hypot(p.z))
            }
            DomainShape::Tube(_) => None,
        }
    }

    /// Exact volume of the continuous region.
    pub fn volume(&self) -> f64 {
        match self {
            DomainShape::Ball { r } => 4.0 * PI * r.powi(3) / 3.0,
            DomainShape::StandardTorus { r, big_r } => 2.0 * PI * PI * r * r * big_r,
            DomainShape::Tube(t) => volume(&t.spec),
        }
    }

    fn bounding_box(&self) -> (Vec3, Vec3) {
        match self {
            DomainShape::Ball { r } => (Vec3::repeat(-r), Vec3::repeat(*r)),
            DomainShape::StandardTorus { r, big_r } => {
                let e = big_r + r;
                (Vec3::new(-e, -e, -r), Vec3::new(e, e, *r))
            }
            DomainShape::Tube(t) => {
                let pad = t.extent + t.spec.curve().spacing();
                let pts = t.spec.curve().points();
                let mut lo = Vec3::repeat(f64::INFINITY);
                let mut hi = Vec3::repeat(f64::NEG_INFINITY);
                for p in pts {
                    lo = lo.inf(p);
                    hi = hi.sup(p);
                }
                (lo - Vec3::repeat(pad), hi + Vec3::repeat(pad))
            }
        }
    }
}

fn section_extent(t: &TubeSpec) -> f64 {
    let n = t.curve().len();
    let step = (n / 64).max(1);
    (0..n)
        .step_by(step)
        .flat_map(|i| t.section_ring(t.curve().arclength_at(i)))
        .map(|[a, b]| a.hypot(b))
        .fold(0.0, f64::max)
        * 1.05
}

/// Point-in-tube test: nearest core point, then the polar radius of the section polygon.
fn tube_contains(region: &TubeRegion, p: Vec3) -> bool {
    let t = &region.spec;
    let curve = t.curve();
    let pts = curve.points();
    let (mut best, mut d2) = (0usize, f64::INFINITY);
    for (i, q) in pts.iter().enumerate() {
        let d = (p - q).norm_squared();
        if d < d2 {
            d2 = d;
            best = i;
        }
    }
    let cutoff = region.extent + curve.spacing();
    if d2 > cutoff * cutoff {
        return false;
    }
    // ternary search for the closest point on the interpolated core
    let ds = curve.spacing();
    let (mut a, mut b) = (curve.arclength_at(best) - ds, curve.arclength_at(best) + ds);
    let dist = |s: f64| (p - curve.position_at(s)).norm_squared();
    for _ in 0..60 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if dist(m1) < dist(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let s = 0.5 * (a + b);
    let f = t.frame_at(s);
    let d = p - f.position;
    let (mu, nu) = (d.dot(&f.normal), d.dot(&f.binormal));
    let r = mu.hypot(nu);
    if r == 0.0 {
        return true;
    }
    let ring = t.section_ring(s.rem_euclid(curve.length()));
    r <= polygon_radius(&ring, mu / r, nu / r)
}

/// Distance from the origin to the boundary of a star-shaped polygon along direction `(c, s)`.
fn polygon_radius(ring: &[[f64; 2]], c: f64, s: f64) -> f64 {
    let n = ring.len();
    let mut best = f64::INFINITY;
    for i in 0..n {
        let [ax, ay] = ring[i];
        let [bx, by] = ring[(i + 1) % n];
        // solve t (c, s) = a + u (b - a), u ∈ [0, 1], t > 0
        let (ex, ey) = (bx - ax, by - ay);
        let det = c * (-ey) - s * (-ex);
        if det.abs() < 1e-300 {
            continue;
        }
        let t = (ax * (-ey) - ay * (-ex)) / det;
        let u = (c * ay - s * ax) / det;
        if (-1e-12..=1.0 + 1e-12).contains(&u) && t > 0.0 {
            best = best.min(t);
        }
    }
    best
}

const NONE: u32 = u32::MAX;

/// Cubical cells of side `h` centred on the lattice `h·(i, j, k)` whose centres lie in the domain.
#[derive(Debug, Clone)]
pub struct VoxelDomain {
    h: f64,
    shape: DomainShape,
    mirrored: bool,
    ijk: Vec<[i32; 3]>,
    centers: Vec<Vec3>,
    /// `+x, −x, +y, −y, +z, −z` neighbour indices, `u32::MAX` when absent.
    neighbors: Vec<[u32; 6]>,
    depth: Vec<u8>,
    lattice: Lattice,
}

/// Erosion depth is counted up to this value.
const MAX_DEPTH: u8 = 8;

impl VoxelDomain {
    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn shape(&self) -> &DomainShape {
        &self.shape
    }

    pub fn is_mirrored(&self) -> bool {
        self.mirrored
    }

    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn centers(&self) -> &[Vec3] {
        &self.centers
    }

    pub fn lattice_index(&self, cell: usize) -> [i32; 3] {
        self.ijk[cell]
    }

    /// Neighbour of `cell` in direction `dir` (`0..6` for `+x, −x, +y, −y, +z, −z`).
    pub fn neighbor(&self, cell: usize, dir: usize) -> Option<usize> {
        let n = self.neighbors[cell][dir];
        (n != NONE).then_some(n as usize)
    }

    /// Cell with lattice index `ijk`, if present.
    pub fn cell_at(&self, ijk: [i32; 3]) -> Option<usize> {
        self.lattice.get(ijk)
    }

    pub(crate) fn neighbor_table(&self) -> &[[u32; 6]] {
        &self.neighbors
    }

    /// Cells with at least one missing face neighbour.
    pub fn is_boundary(&self, cell: usize) -> bool {
        self.neighbors[cell].contains(&NONE)
    }

    /// Number of erosion steps (26-neighbourhood) the cell survives, capped at 8. A cell of
    /// depth `k` has every lattice point within `k` steps in each axis inside the domain.
    pub fn depth(&self, cell: usize) -> u8 {
        self.depth[cell]
    }

    /// Indices of cells at depth at least `k`.
    pub fn interior_cells(&self, k: u8) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.depth[c] >= k).collect()
    }

    /// Cells at distance at least `d` from the boundary: the exact distance for balls and
    /// standard tori, otherwise `depth · h` (which saturates at `8h`).
    pub fn cells_at_distance(&self, d: f64) -> Vec<usize> {
        (0..self.len())
            .filter(|&c| {
                let p = self.centers[c];
                let p = if self.mirrored { Vec3::new(p.x, p.y, -p.z) } else { p };
                match self.shape.boundary_distance(p) {
                    Some(dist) => dist >= d,
                    None => self.depth[c] as f64 * self.h >= d,
                }
            })
            .collect()
    }

    /// `cells · h³`.
    pub fn discrete_volume(&self) -> f64 {
        self.len() as f64 * self.h.powi(3)
    }

    /// Volume of the continuous domain.
    pub fn analytic_volume(&self) -> f64 {
        self.shape.volume()
    }

    /// Whether `p` lies in the continuous domain.
    pub fn contains(&self, p: Vec3) -> bool {
        if self.mirrored {
            self.shape.contains(Vec3::new(p.x, p.y, -p.z))
        } else {
            self.shape.contains(p)
        }
    }

    /// Reflection through the plane `z = 0`. Cell `i` of the result is the image of cell `i`.
    pub fn mirrored(&self) -> VoxelDomain {
        let ijk: Vec<[i32; 3]> = self.ijk.iter().map(|&[i, j, k]| [i, j, -k]).collect();
        let mut out = VoxelDomain::from_cells(self.h, self.shape.clone(), ijk);
        out.mirrored = !self.mirrored;
        out
    }

    fn from_cells(h: f64, shape: DomainShape, ijk: Vec<[i32; 3]>) -> Self {
        let lattice = Lattice::new(&ijk);
        let centers = ijk
            .iter()
            .map(|&[i, j, k]| Vec3::new(i as f64, j as f64, k as f64) * h)
            .collect();
        const DIRS: [[i32; 3]; 6] = [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]];
        let neighbors = ijk
            .iter()
            .map(|&[i, j, k]| DIRS.map(|[a, b, c]| lattice.get([i + a, j + b, k + c]).map_or(NONE, |n| n as u32)))
            .collect();
        let depth = erosion_depth(&ijk, &lattice);
        Self {
            h,
            shape,
            mirrored: false,
            ijk,
            centers,
            neighbors,
            depth,
            lattice,
        }
    }
}

/// Dense index over the bounding box of a set of lattice points.
#[derive(Debug, Clone)]
struct Lattice {
    lo: [i32; 3],
    dims: [usize; 3],
    index: Vec<u32>,
}

impl Lattice {
    fn new(ijk: &[[i32; 3]]) -> Self {
        let mut lo = [i32::MAX; 3];
        let mut hi = [i32::MIN; 3];
        for p in ijk {
            for d in 0..3 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        let dims = [0, 1, 2].map(|d| (hi[d] - lo[d] + 1).max(0) as usize);
        let mut index = vec![NONE; dims[0] * dims[1] * dims[2]];
        let mut out = Self {
            lo,
            dims,
            index: vec![],
        };
        for (n, p) in ijk.iter().enumerate() {
            index[out.offset(*p).expect("point inside its own bounding box")] = n as u32;
        }
        out.index = index;
        out
    }

    fn offset(&self, p: [i32; 3]) -> Option<usize> {
        let mut o = 0usize;
        for (d, pd) in p.into_iter().enumerate() {
            let q = pd - self.lo[d];
            if q < 0 || q as usize >= self.dims[d] {
                return None;
            }
            o = o * self.dims[d] + q as usize;
        }
        Some(o)
    }

    fn get(&self, p: [i32; 3]) -> Option<usize> {
        self.offset(p)
            .map(|o| self.index[o])
            .filter(|&v| v != NONE)
            .map(|v| v as usize)
    }
}

fn erosion_depth(ijk: &[[i32; 3]], lattice: &Lattice) -> Vec<u8> {
    let n = ijk.len();
    let mut depth = vec![0u8; n];
    let mut alive: Vec<bool> = vec![true; n];
    for level in 1..=MAX_DEPTH {
        let next: Vec<bool> = (0..n)
            .map(|c| {
                if !alive[c] {
                    return false;
                }
                let [i, j, k] = ijk[c];
                for a in -1..=1 {
                    for b in -1..=1 {
                        for d in -1..=1 {
                            match lattice.get([i + a, j + b, k + d]) {
                                Some(m) if alive[m] => {}
                                _ => return false,
                            }
                        }
                    }
                }
                true
            })
            .collect();
        for c in 0..n {
            if next[c] {
                depth[c] = level;
            }
        }
        alive = next;
    }
    depth
}

/// Cells of side `h` whose centres `h·(i, j, k)` satisfy the inside predicate.
pub fn voxelize(shape: DomainShape, h: f64) -> Result<VoxelDomain, BiotSavartError> {
    if !(h.is_finite() && h > 0.0) {
        return Err(BiotSavartError::InvalidParameter(format!(
            "h must be positive, got {h}"
        )));
    }
    let (lo, hi) = shape.bounding_box();
    let range = |d: usize| ((lo[d] / h).ceil() as i32)..=((hi[d] / h).floor() as i32);
    let mut ijk = Vec::new();
    for i in range(0) {
        for j in range(1) {
            for k in range(2) {
                let p = Vec3::new(i as f64, j as f64, k as f64) * h;
                if shape.contains(p) {
                    ijk.push([i, j, k]);
                }
            }
        }
    }
    if ijk.is_empty() {
        return Err(BiotSavartError::EmptyDomain { h });
    }
    Ok(VoxelDomain::from_cells(h, shape, ijk))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volume_and_neighbours() {
        let d = voxelize(DomainShape::Ball { r: 1.0 }, 0.25).unwrap();
        for c in 0..d.len() {
            for dir in 0..6 {
                if let Some(n) = d.neighbor(c, dir) {
                    let back = dir ^ 1;
                    assert_eq!(d.neighbor(n, back), Some(c));
                    assert!(((d.centers()[n] - d.centers()[c]).norm() - 0.25).abs() < 1e-12);
                }
            }
        }
        // the cube of half-width 2h fits in the unit ball (corner at 0.87), half-width 3h does not (1.30)
        assert_eq!(d.depth(d.centers().iter().position(|p| p.norm() == 0.0).unwrap()), 2);
    }

    #[test]
    fn tiny_domains() {
        assert!(matches!(
            voxelize(DomainShape::Ball { r: 0.1 }, 0.15).map(|d| d.len()),
            Ok(1)
        ));
        let off = DomainShape::StandardTorus { r: 0.01, big_r: 1.25 };
        assert!(matches!(voxelize(off, 0.5), Err(BiotSavartError::EmptyDomain { .. })));
    }

    #[test]
    fn polygon_radius_of_square() {
        let ring = [[1.0, -1.0], [1.0, 1.0], [-1.0, 1.0], [-1.0, -1.0]];
        assert!((polygon_radius(&ring, 1.0, 0.0) - 1.0).abs() < 1e-14);
        let c = 0.5f64.sqrt();
        assert!((polygon_radius(&ring, c, c) - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn domain_spec_json() {
        let b: DomainSpec = serde_json::from_str(r#"{"ball":{"r":1}}"#).unwrap();
        assert_eq!(b, DomainSpec::Ball { r: 1.0 });
        let t: DomainSpec = serde_json::from_str(r#"{"torus":{"r":1,"R":3}}"#).unwrap();
        assert!(matches!(t.shape().unwrap(), DomainShape::StandardTorus { .. }));
        let bad: DomainSpec = serde_json::from_str(r#"{"torus":{"r":3,"R":1}}"#).unwrap();
        assert!(bad.shape().is_err());
    }
}

use super::{FieldLinePath, SurfaceField, SurfaceFlowError};
use crate::torusgeom::{geometric_constants, TubeSpec};
use serde::Serialize;
use std::f64::consts::PI;

/// Fewest markers accepted by [`winding_limits`].
pub const MIN_MARKERS: usize = 5;

/// Limits of the normalised poloidal and toroidal circulations along a field line.
///
/// `a_hat` counts poloidal turns per unit time and `b_hat` toroidal turns per unit time.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindingEstimate {
    pub a_hat: f64,
    pub a_err: f64,
    pub b_hat: f64,
    pub b_err: f64,
    /// `b_hat / a_hat`.
    pub ratio: f64,
    pub ratio_err: f64,
    pub turn_count: usize,
    pub markers: Vec<f64>,
    /// Embedded length of the path up to each marker.
    pub lengths: Vec<f64>,
    pub pbar: Option<f64>,
    pub qbar: Option<f64>,
}

/// Estimates the winding limits from the lifted coordinates at the markers.
///
/// The pairings use `dφ/2π` and `ds/L`. For each marker `j` in the upper half of the list
/// the secant slope between `T_{⌊j/2⌋}` and `T_j` is formed (marker 0 is the start); this
/// removes the bounded offset of the lift to first order. The reported value is the last
/// secant and the error is the spread of the tail secants around it.
pub fn winding_limits(path: &FieldLinePath, markers: &[f64]) -> Result<WindingEstimate, SurfaceFlowError> {
    if markers.len() < MIN_MARKERS {
        return Err(SurfaceFlowError::TooFewMarkers {
            needed: MIN_MARKERS,
            got: markers.len(),
        });
    }
    let (t_start, t_stop) = (path.times[0], *path.times.last().unwrap());
    let ordered = markers.windows(2).all(|w| w[1] > w[0]);
    if !ordered || markers[0] <= t_start || markers[markers.len() - 1] > t_stop * (1.0 + 1e-12) {
        return Err(SurfaceFlowError::BadMarkers);
    }
    let at = |n: usize| -> (f64, [f64; 3]) {
        if n == 0 {
            (t_start, [path.s[0], path.phi[0], 0.0])
        } else {
            let t = markers[n - 1];
            (t, path.interpolate(t))
        }
    };
    let l = path.period_s();
    let secant = |j: usize| -> (f64, f64) {
        let (tj, yj) = at(j);
        let (tm, ym) = at(j / 2);
        let dt = tj - tm;
        ((yj[1] - ym[1]) / (2.0 * PI * dt), (yj[0] - ym[0]) / (l * dt))
    };
    let n = markers.len();
    let (a_hat, b_hat) = secant(n);
    let (mut a_err, mut b_err) = (0.0_f64, 0.0_f64);
    for j in n.div_ceil(2)..n {
        let (a, b) = secant(j);
        a_err = a_err.max((a - a_hat).abs());
        b_err = b_err.max((b - b_hat).abs());
    }
    let ratio = b_hat / a_hat;
    let ratio_err = (b_err + ratio.abs() * a_err) / a_hat.abs();
    Ok(WindingEstimate {
        a_hat,
        a_err,
        b_hat,
        b_err,
        ratio,
        ratio_err,
        turn_count: n,
        markers: markers.to_vec(),
        lengths: markers.iter().map(|t| path.interpolate(*t)[2]).collect(),
        pbar: None,
        qbar: None,
    })
}

/// Which 1-forms pair with the field in [`pbar_qbar`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum HarmonicBasis {
    /// Harmonic forms of the standard torus: `γ_p = C dφ / w` with `w` the distance to the
    /// symmetry axis and `C = √(R²−r²)/2π`, and `γ_t = ds/L`.
    Exact,
    /// Coordinate forms `dφ/2π` and `ds/L`; they lie in the right cohomology classes but are
    /// not co-closed in general.
    CoordinateProxy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SurfaceAverages {
    pub pbar: f64,
    pub qbar: f64,
    /// Boundary area `|∂Ω|` from the same quadrature.
    pub area: f64,
    pub basis: HarmonicBasis,
}

/// Surface averages of `γ_p(X)` and `γ_t(X)` on a 256 × 128 midpoint grid.
pub fn pbar_qbar(
    tube: &TubeSpec,
    field: &SurfaceField,
    basis: HarmonicBasis,
) -> Result<SurfaceAverages, SurfaceFlowError> {
    pbar_qbar_with(tube, field, basis, 256, 128)
}

/// [`pbar_qbar`] with an explicit `n_s × n_φ` grid. The midpoint rule is spectrally accurate
/// for smooth periodic integrands.
pub fn pbar_qbar_with(
    tube: &TubeSpec,
    field: &SurfaceField,
    basis: HarmonicBasis,
    n_s: usize,
    n_phi: usize,
) -> Result<SurfaceAverages, SurfaceFlowError> {
    if n_s < 4 || n_phi < 4 {
        return Err(SurfaceFlowError::InvalidParameter(format!(
            "grid {n_s} x {n_phi} is too coarse"
        )));
    }
    let c = match basis {
        HarmonicBasis::Exact => {
            let (r, big) = tube.standard_torus().ok_or(SurfaceFlowError::NotAxisymmetric)?;
            Some((big, (big * big - r * r).sqrt() / (2.0 * PI)))
        }
        HarmonicBasis::CoordinateProxy => None,
    };
    let l = tube.length();
    let (hs, hp) = (l / n_s as f64, 2.0 * PI / n_phi as f64);
    let (mut area, mut p, mut q) = (0.0, 0.0, 0.0);
    for i in 0..n_s {
        let s = (i as f64 + 0.5) * hs;
        for j in 0..n_phi {
            let phi = (j as f64 + 0.5) * hp;
            let g = tube.boundary_metric(s, phi);
            let da = (g[0][0] * g[1][1] - g[0][1] * g[0][1]).max(0.0).sqrt() * hs * hp;
            let (fs, fp) = field.eval(s, phi);
            let gp = match c {
                // ∂_sΨ has length w/R on the standard torus
                Some((big, c)) => c / (big * g[0][0].sqrt()),
                None => 1.0 / (2.0 * PI),
            };
            area += da;
            p += gp * fp * da;
            q += fs / l * da;
        }
    }
    Ok(SurfaceAverages {
        pbar: p / area,
        qbar: q / area,
        area,
        basis,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LengthMargins {
    pub xi: f64,
    #[serde(rename = "Pi")]
    pub pi: f64,
    /// `ℓ(Tₙ) − ξ n Π` per marker.
    pub margins: Vec<f64>,
    /// Present for constant-radius tubes.
    pub eta: Option<f64>,
    /// `ℓ(Tₙ) − η n Π` per marker.
    pub eta_margins: Option<Vec<f64>>,
}

impl LengthMargins {
    pub fn min_margin(&self) -> f64 {
        self.margins
            .iter()
            .chain(self.eta_margins.iter().flatten())
            .fold(f64::INFINITY, |a, b| a.min(*b))
    }
}

/// Compares the embedded length up to each turn marker with `ξ n Π`, and with `η n Π`
/// when `η` is defined.
pub fn length_inequality_check(tube: &TubeSpec, path: &FieldLinePath, markers: &[f64]) -> LengthMargins {
    let gc = geometric_constants(tube);
    let lengths: Vec<f64> = markers.iter().map(|t| path.interpolate(*t)[2]).collect();
    let margins_for = |k: f64| -> Vec<f64> {
        lengths
            .iter()
            .enumerate()
            .map(|(i, len)| len - k * (i + 1) as f64 * gc.pi)
            .collect()
    };
    LengthMargins {
        xi: gc.xi,
        pi: gc.pi,
        margins: margins_for(gc.xi),
        eta: gc.eta,
        eta_margins: gc.eta.map(margins_for),
    }
}

use super::{resample_arclength, CurveError, SampledCurve};
use crate::Vec3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Default number of arc-length samples for analytic curves.
pub const DEFAULT_SAMPLES: usize = 512;

/// Closed curve description as read from JSON, e.g. `{"type": "circle", "radius": 3}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveShape {
    /// Circle of the given radius in the xy-plane, centred at the origin.
    Circle { radius: f64 },
    /// Ellipse `(a cos t, b sin t, 0)`.
    Ellipse { a: f64, b: f64 },
    /// `((R + r cos qt) cos pt, (R + r cos qt) sin pt, r sin qt)`.
    TorusKnot {
        p: i64,
        q: i64,
        #[serde(rename = "R")]
        major: f64,
        #[serde(rename = "r")]
        minor: f64,
    },
    /// Closed polyline; the endpoint must not repeat the first point.
    Samples { points: Vec<[f64; 3]> },
}

/// A curve shape plus the number of arc-length samples to build it with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveInput {
    #[serde(flatten)]
    pub shape: CurveShape,
    #[serde(default)]
    pub n: Option<usize>,
}

impl CurveInput {
    pub fn build(&self) -> Result<SampledCurve, CurveError> {
        self.shape.sample(self.n.unwrap_or(DEFAULT_SAMPLES))
    }
}

impl CurveShape {
    /// Raw points used as spline control points.
    pub fn raw_points(&self, n: usize) -> Result<Vec<Vec3>, CurveError> {
        let dense = (16 * n).max(4096);
        let param = |f: &dyn Fn(f64) -> Vec3| -> Vec<Vec3> {
            (0..dense).map(|i| f(2.0 * PI * i as f64 / dense as f64)).collect()
        };
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(CurveError::Degenerate(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            CurveShape::Circle { radius } => {
                positive("radius", *radius)?;
                Ok(param(&|t| Vec3::new(radius * t.cos(), radius * t.sin(), 0.0)))
            }
            CurveShape::Ellipse { a, b } => {
                positive("a", *a)?;
                positive("b", *b)?;
                Ok(param(&|t| Vec3::new(a * t.cos(), b * t.sin(), 0.0)))
            }
            CurveShape::TorusKnot { p, q, major, minor } => {
                positive("R", *major)?;
                positive("r", *minor)?;
                if *p == 0 || *q == 0 {
                    return Err(CurveError::Degenerate("p and q must be nonzero".into()));
                }
                let (p, q) = (*p as f64, *q as f64);
                Ok(param(&|t| torus_knot_point(p, q, *major, *minor, t)))
            }
            CurveShape::Samples { points } => Ok(points.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect()),
        }
    }

    /// Arc-length resampled curve with `n` points.
    pub fn sample(&self, n: usize) -> Result<SampledCurve, CurveError> {
        resample_arclength(&self.raw_points(n)?, n)
    }
}

fn torus_knot_point(p: f64, q: f64, big: f64, small: f64, t: f64) -> Vec3 {
    let rho = big + small * (q * t).cos();
    Vec3::new(rho * (p * t).cos(), rho * (p * t).sin(), small * (q * t).sin())
}

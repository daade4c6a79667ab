use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Debug;

/// A smooth family of star-shaped cross-sections `ψ_s(ρ, φ) = ρ·ψ_s(1, φ)`.
///
/// Coordinates are `(μ, ν)` in the normal plane spanned by `(N(s), B(s))`, in length units.
/// `s` is arc length along the core curve and the family must be `L`-periodic in `s`.
pub trait SectionFamily: Debug + Send + Sync {
    /// Boundary point `ψ_s(1, φ)`.
    fn boundary(&self, s: f64, phi: f64) -> [f64; 2];

    /// `∂_φ ψ_s(1, φ)`; defaults to a central difference.
    fn d_phi(&self, s: f64, phi: f64) -> [f64; 2] {
        let h = 1e-5;
        let (a, b) = (self.boundary(s, phi + h), self.boundary(s, phi - h));
        [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
    }

    /// `∂_s ψ_s(1, φ)`; defaults to a central difference.
    fn d_s(&self, s: f64, phi: f64) -> [f64; 2] {
        let h = 1e-5;
        let (a, b) = (self.boundary(s + h, phi), self.boundary(s - h, phi));
        [(a[0] - b[0]) / (2.0 * h), (a[1] - b[1]) / (2.0 * h)]
    }

    /// Constant radius if every section is the same round disc centred on the core.
    fn disc_radius(&self) -> Option<f64> {
        None
    }

    /// True when the sections do not depend on `s` (in the Frenet frame).
    fn is_s_independent(&self) -> bool {
        false
    }
}

/// Round disc of radius `R`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disc {
    pub radius: f64,
}

impl SectionFamily for Disc {
    fn boundary(&self, _s: f64, phi: f64) -> [f64; 2] {
        [self.radius * phi.cos(), self.radius * phi.sin()]
    }

    fn d_phi(&self, _s: f64, phi: f64) -> [f64; 2] {
        [-self.radius * phi.sin(), self.radius * phi.cos()]
    }

    fn d_s(&self, _s: f64, _phi: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn disc_radius(&self) -> Option<f64> {
        Some(self.radius)
    }

    fn is_s_independent(&self) -> bool {
        true
    }
}

/// Ellipse with semi-axes `a` (along `N` at `s = 0`) and `b`, rotated by `2π·twist·s/L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatingEllipse {
    pub a: f64,
    pub b: f64,
    pub twist: i64,
    pub length: f64,
}

impl RotatingEllipse {
    fn angle_rate(&self) -> f64 {
        2.0 * PI * self.twist as f64 / self.length
    }

    fn rotate(&self, s: f64, v: [f64; 2]) -> [f64; 2] {
        let (sn, cs) = (self.angle_rate() * s).sin_cos();
        [cs * v[0] - sn * v[1], sn * v[0] + cs * v[1]]
    }
}

impl SectionFamily for RotatingEllipse {
    fn boundary(&self, s: f64, phi: f64) -> [f64; 2] {
        self.rotate(s, [self.a * phi.cos(), self.b * phi.sin()])
    }

    fn d_phi(&self, s: f64, phi: f64) -> [f64; 2] {
        self.rotate(s, [-self.a * phi.sin(), self.b * phi.cos()])
    }

    fn d_s(&self, s: f64, phi: f64) -> [f64; 2] {
        // derivative of the rotation is rotation by a further quarter turn, times the rate
        let p = self.boundary(s, phi);
        let w = self.angle_rate();
        [-w * p[1], w * p[0]]
    }

    fn disc_radius(&self) -> Option<f64> {
        (self.a == self.b).then_some(self.a)
    }

    fn is_s_independent(&self) -> bool {
        self.twist == 0 || self.a == self.b
    }
}

/// JSON description of a section family: `{"type": "ellipse", "a": .., "b": .., "twist": ..}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SectionInput {
    Disc {
        radius: f64,
    },
    Ellipse {
        a: f64,
        b: f64,
        #[serde(default)]
        twist: i64,
    },
}

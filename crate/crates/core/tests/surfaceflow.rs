use helicert_core::quadrature::gauss_legendre_on;
use helicert_core::surfaceflow::{
    length_inequality_check, pbar_qbar, poloidal_turn_markers, trace, winding_limits, HarmonicBasis, SurfaceField,
    SurfaceFlowError,
};
use helicert_core::torusgeom::{geometric_constants, TubeInput, TubeSpec};
use proptest::prelude::*;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn tube(json: &str) -> TubeSpec {
    serde_json::from_str::<TubeInput>(json).unwrap().build().unwrap()
}

fn standard() -> &'static TubeSpec {
    static T: OnceLock<TubeSpec> = OnceLock::new();
    T.get_or_init(|| tube(r#"{"torus":{"r":1,"R":3}}"#))
}

fn trefoil() -> &'static TubeSpec {
    static T: OnceLock<TubeSpec> = OnceLock::new();
    T.get_or_init(|| tube(r#"{"curve":{"type":"torus_knot","p":2,"q":3,"R":2,"r":0.5},"radius":0.2}"#))
}

fn twisted_ellipse() -> &'static TubeSpec {
    static T: OnceLock<TubeSpec> = OnceLock::new();
    T.get_or_init(|| {
        tube(r#"{"curve":{"type":"ellipse","a":3,"b":2.5},"sections":{"type":"ellipse","a":0.5,"b":0.3,"twist":2}}"#)
    })
}

/// Chart field advancing `a` poloidal and `b` toroidal turns per unit time.
fn linear(t: &TubeSpec, a: f64, b: f64) -> SurfaceField {
    SurfaceField::constant(t.length() * b, 2.0 * PI * a)
}

/// `∫₀^{2π} dφ / (R − r cos φ)` by composite Gauss-Legendre.
fn inverse_axis_distance_integral(r: f64, big: f64) -> f64 {
    (0..64)
        .map(|k| {
            let (x, w) = gauss_legendre_on(16, 2.0 * PI * k as f64 / 64.0, 2.0 * PI * (k + 1) as f64 / 64.0);
            x.iter().zip(&w).map(|(p, w)| w / (big - r * p.cos())).sum::<f64>()
        })
        .sum()
}

#[test]
fn linear_fields_give_their_slopes() {
    let t = standard();
    for (a, b) in [(0.37, 0.81), (1.3, -0.2), (-0.6, 0.45)] {
        let path = trace(t, &linear(t, a, b), (0.3, 0.1), 1000.0, 0.01).unwrap();
        let markers = poloidal_turn_markers(&path).unwrap();
        let est = winding_limits(&path, &markers).unwrap();
        assert!((est.a_hat - a).abs() < 1e-3, "a {} vs {a}", est.a_hat);
        assert!((est.b_hat - b).abs() < 1e-3, "b {} vs {b}", est.b_hat);
        assert!((est.turn_count as f64 - a.abs() * 1000.0).abs() <= 1.0);
    }
}

#[test]
fn rational_linear_field_closes() {
    let t = standard();
    // two poloidal and three toroidal turns per unit time
    let path = trace(t, &linear(t, 2.0, 3.0), (0.4, 0.9), 1.0, 1e-3).unwrap();
    let pts = path.embedded(t);
    let (first, last) = (pts[0], pts[pts.len() - 1]);
    assert!((first - last).norm() < 1e-9, "gap {}", (first - last).norm());
    // and does not close earlier
    let mid = pts[pts.len() / 2];
    assert!((mid - first).norm() > 0.1);
}

#[test]
fn irrational_linear_field_has_constant_lift_slope() {
    let t = trefoil();
    let slope = 2f64.sqrt();
    let path = trace(t, &SurfaceField::constant(1.0, slope), (0.0, 0.0), 200.0, 0.01).unwrap();
    for k in (1..path.len()).step_by(997) {
        let q = (path.phi[k] - path.phi[0]) / (path.s[k] - path.s[0]);
        assert!((q - slope).abs() < 1e-9, "slope {q}");
    }
}

#[test]
fn toroidal_coordinate_circle_has_ring_length() {
    let t = standard();
    let phi0 = 0.7;
    let l = t.length();
    let path = trace(t, &SurfaceField::constant(1.0, 0.0), (0.0, phi0), l, l / 4000.0).unwrap();
    // the inner normal points at the axis, so the ring radius is R − r cos φ
    let ring = 2.0 * PI * (3.0 - phi0.cos());
    let len = path.length[path.len() - 1];
    assert!((len - ring).abs() < 1e-6 * ring, "{len} vs {ring}");
}

#[test]
fn poloidal_coordinate_circle_has_section_perimeter() {
    for t in [standard(), trefoil(), twisted_ellipse()] {
        let s0 = 0.37 * t.length();
        let path = trace(
            t,
            &SurfaceField::constant(0.0, 1.0),
            (s0, 0.0),
            2.0 * PI,
            2.0 * PI / 4000.0,
        )
        .unwrap();
        let ring = t.section_ring(s0);
        // dense polygon perimeter of the section as the oracle
        let n = 20000;
        let perimeter: f64 = (0..n)
            .map(|j| {
                let p = t.embed(s0, 1.0, 2.0 * PI * j as f64 / n as f64);
                let q = t.embed(s0, 1.0, 2.0 * PI * (j + 1) as f64 / n as f64);
                (q - p).norm()
            })
            .sum();
        let len = path.length[path.len() - 1];
        assert!(!ring.is_empty());
        assert!((len - perimeter).abs() < 1e-6 * perimeter, "{len} vs {perimeter}");
    }
}

#[test]
fn markers_of_constant_fields() {
    let path = trace(standard(), &SurfaceField::constant(0.0, 1.0), (0.0, 0.0), 40.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    assert_eq!(m.len(), 6);
    for (n, t) in m.iter().enumerate() {
        assert!((t - 2.0 * PI * (n + 1) as f64).abs() < 1e-10);
    }
    let unit = tube(r#"{"curve":{"type":"circle","radius":1},"radius":0.5}"#);
    assert!((unit.length() - 2.0 * PI).abs() < 1e-8);
    let path = trace(&unit, &SurfaceField::constant(1.0, 3.0), (0.0, 0.0), 20.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    assert_eq!(m.len(), 9);
    for (n, t) in m.iter().enumerate() {
        assert!((t - 2.0 * PI * (n + 1) as f64 / 3.0).abs() < 1e-10);
    }
}

#[test]
fn markers_of_perturbed_field_match_period_integral() {
    let f = SurfaceField::new(|_, _| 0.5, |_, p| 1.0 + 0.3 * p.cos());
    let path = trace(standard(), &f, (0.0, 0.0), 100.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    // time for one turn is ∫ dφ / (1 + 0.3 cos φ)
    let period = 2.0 * PI / (1.0f64 - 0.09).sqrt();
    assert_eq!(m.len(), (100.0 / period).floor() as usize);
    for (n, t) in m.iter().enumerate() {
        assert!((t - period * (n + 1) as f64).abs() < 1e-7, "marker {n}: {t}");
    }
    // a finer trace moves the markers by less than the tolerance above
    let fine = trace(standard(), &f, (0.0, 0.0), 100.0, 0.001).unwrap();
    let mf = poloidal_turn_markers(&fine).unwrap();
    for (a, b) in m.iter().zip(&mf) {
        assert!((a - b).abs() < 1e-7);
    }
}

#[test]
fn markers_need_a_full_turn() {
    let path = trace(standard(), &SurfaceField::constant(1.0, 0.1), (0.0, 0.0), 10.0, 0.01).unwrap();
    assert!(matches!(
        poloidal_turn_markers(&path),
        Err(SurfaceFlowError::NoTurns { .. })
    ));
    let path = trace(standard(), &SurfaceField::constant(1.0, 1.0), (0.0, 0.0), 20.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    assert!(matches!(
        winding_limits(&path, &m[..3]),
        Err(SurfaceFlowError::TooFewMarkers { needed: 5, got: 3 })
    ));
}

#[test]
fn lift_consistency_between_markers_and_limits() {
    let f = SurfaceField::parse("1 + 0.2*cos(phi)", "2.3 + 0.4*sin(s/3) + 0.3*cos(phi)").unwrap();
    let path = trace(standard(), &f, (0.0, 0.0), 300.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    let est = winding_limits(&path, &m).unwrap();
    for (n, t) in m.iter().enumerate().skip(m.len() / 2) {
        let turns = est.a_hat * t;
        assert!((turns / (n + 1) as f64 - 1.0).abs() < 0.01, "{turns} vs {}", n + 1);
    }
}

#[test]
fn rescaling_keeps_the_slope() {
    let t = standard();
    let f = SurfaceField::parse("1 + 0.2*cos(phi)", "2.3 + 0.4*sin(s/3) + 0.3*cos(phi)").unwrap();
    let g = f.rescaled(|s, _| 2.0 + s.sin());
    let run = |field: &SurfaceField| {
        let path = trace(t, field, (0.0, 0.0), 1000.0, 0.005).unwrap();
        winding_limits(&path, &poloidal_turn_markers(&path).unwrap()).unwrap()
    };
    let (e1, e2) = (run(&f), run(&g));
    assert!((e1.a_hat - e2.a_hat).abs() > 0.05, "limits should move");
    let tol = 2.0 * (e1.ratio_err + e2.ratio_err);
    assert!(
        (e1.ratio - e2.ratio).abs() <= tol,
        "{} vs {} (tol {tol})",
        e1.ratio,
        e2.ratio
    );
}

#[test]
fn winding_ratio_matches_surface_averages() {
    let t = standard();
    let big = 3.0;
    // (A, B)/w is divergence free for the area form of the standard torus
    for (a, b) in [(1.0, 0.7), (0.45, 2.0)] {
        let w = move |_: f64, p: f64| big - p.cos();
        let f = SurfaceField::new(move |s, p| a / w(s, p), move |s, p| b / w(s, p));
        let avg = pbar_qbar(t, &f, HarmonicBasis::Exact).unwrap();
        let path = trace(t, &f, (0.0, 0.0), 1000.0, 0.01).unwrap();
        let est = winding_limits(&path, &poloidal_turn_markers(&path).unwrap()).unwrap();
        let q = avg.qbar / avg.pbar;
        assert!((est.ratio - q).abs() < 1e-3 * q.abs(), "{} vs {q}", est.ratio);
        assert!((q - a / (big * b)).abs() < 1e-9);
    }
}

#[test]
fn harmonic_poloidal_form_pairs_with_itself() {
    let t = standard();
    let (r, big): (f64, f64) = (1.0, 3.0);
    let c = (big * big - r * r).sqrt() / (2.0 * PI);
    // metric dual of γ_p: only a φ component, C / (w r²)
    let gp = SurfaceField::new(|_, _| 0.0, move |_, p| c / ((big - r * p.cos()) * r * r));
    let avg = pbar_qbar(t, &gp, HarmonicBasis::Exact).unwrap();
    let area = 4.0 * PI * PI * r * big;
    let norm_sq = t.length() * c * c / (r * big) * inverse_axis_distance_integral(r, big);
    assert!((avg.area - area).abs() < 1e-6 * area);
    assert!(
        (avg.pbar - norm_sq / area).abs() < 1e-6 * avg.pbar,
        "{} vs {}",
        avg.pbar,
        norm_sq / area
    );
    assert!(avg.pbar > 0.0);
    assert!(avg.qbar.abs() < 1e-6);

    let zero = pbar_qbar(t, &SurfaceField::constant(0.0, 0.0), HarmonicBasis::Exact).unwrap();
    assert_eq!((zero.pbar, zero.qbar), (0.0, 0.0));
}

#[test]
fn gradients_do_not_change_the_averages() {
    let t = standard();
    let (r, big): (f64, f64) = (1.0, 3.0);
    let l = t.length();
    let c = (big * big - r * r).sqrt() / (2.0 * PI);
    let k = 2.0 * PI / l;
    // f = sin(ks) cos φ + 0.3 sin(2φ) + 0.2 cos(2ks + φ); gradient = (R/w)² ∂_s f ∂_s + r⁻² ∂_φ f ∂_φ
    let fs = move |s: f64, p: f64| k * (s * k).cos() * p.cos() - 0.4 * k * (2.0 * k * s + p).sin();
    let fp = move |s: f64, p: f64| -(s * k).sin() * p.sin() + 0.6 * (2.0 * p).cos() - 0.2 * (2.0 * k * s + p).sin();
    let w = move |p: f64| big - r * p.cos();
    let base = SurfaceField::new(|_, _| 0.7, move |_, p| c / (w(p) * r * r));
    let with_grad = SurfaceField::new(
        move |s, p| 0.7 + (big / w(p)).powi(2) * fs(s, p),
        move |s, p| c / (w(p) * r * r) + fp(s, p) / (r * r),
    );
    let a = pbar_qbar(t, &base, HarmonicBasis::Exact).unwrap();
    let b = pbar_qbar(t, &with_grad, HarmonicBasis::Exact).unwrap();
    assert!((a.pbar - b.pbar).abs() < 1e-9 * a.pbar, "{} vs {}", a.pbar, b.pbar);
    assert!((a.qbar - b.qbar).abs() < 1e-9 * a.qbar.abs());
}

#[test]
fn exact_basis_needs_a_standard_torus() {
    let r = pbar_qbar(trefoil(), &SurfaceField::constant(1.0, 1.0), HarmonicBasis::Exact);
    assert!(matches!(r, Err(SurfaceFlowError::NotAxisymmetric)));
    let proxy = pbar_qbar(
        trefoil(),
        &SurfaceField::constant(0.0, 2.0 * PI),
        HarmonicBasis::CoordinateProxy,
    )
    .unwrap();
    assert!((proxy.pbar - 1.0).abs() < 1e-12);
}

#[test]
fn pure_poloidal_turns_have_margin_one_minus_xi() {
    let t = trefoil();
    let gc = geometric_constants(t);
    let path = trace(t, &SurfaceField::constant(0.0, 1.0), (1.0, 0.0), 40.0, 0.005).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    let margins = length_inequality_check(t, &path, &m);
    for (n, v) in margins.margins.iter().enumerate() {
        let expect = (1.0 - gc.xi) * (n + 1) as f64 * gc.pi;
        assert!((v - expect).abs() < 1e-6 * (n + 1) as f64, "{v} vs {expect}");
        assert!(*v >= 0.0);
    }
    assert!(margins.eta_margins.unwrap().iter().all(|v| *v >= 0.0));
}

#[test]
fn margins_on_the_standard_torus() {
    let t = standard();
    let f = SurfaceField::parse("1 + 0.2*cos(phi)", "2.3 + 0.4*sin(s/3) + 0.3*cos(phi)").unwrap();
    let path = trace(t, &f, (0.0, 0.0), 100.0, 0.01).unwrap();
    let m = poloidal_turn_markers(&path).unwrap();
    let margins = length_inequality_check(t, &path, &m);
    assert!(margins.min_margin() >= 0.0);
    let est = winding_limits(&path, &m).unwrap();
    assert_eq!(est.lengths.len(), m.len());
    assert!(est.lengths.windows(2).all(|w| w[1] > w[0]));
}

fn random_field(c: [f64; 6], l: f64) -> SurfaceField {
    let k = 2.0 * PI / l;
    // |f_φ| ≥ c0 − 0.45 − 0.45 > 0
    SurfaceField::new(
        move |s, p| c[1] + c[2] * (k * s + p).cos() + 0.5 * (2.0 * p).sin(),
        move |s, p| c[0] + 0.45 * c[3].signum() * (k * s - c[4] * p.round()).sin() + 0.45 * (p + c[5]).cos(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn length_margins_are_nonnegative(
        which in 0usize..3,
        c in prop::array::uniform6(-1.0..1.0f64),
        base in 1.0..3.0f64,
        start in 0.0..6.0f64,
    ) {
        let t = [standard(), trefoil(), twisted_ellipse()][which];
        let mut c = c;
        c[0] = if c[0] >= 0.0 { base } else { -base };
        let f = random_field(c, t.length());
        let path = trace(t, &f, (start, start), 30.0, 0.01).unwrap();
        let m = poloidal_turn_markers(&path).unwrap();
        let margins = length_inequality_check(t, &path, &m);
        prop_assert!(margins.min_margin() >= -1e-6, "min margin {}", margins.min_margin());
    }
}

use crate::report::{emit, fmt_f64, parse_json, positive, read_json, write_text, CliError, Meta};
use crate::{CertifyArgs, CommonArgs, CurveInfoArgs, SpectrumArgs, TraceArgs};
use helicert_core::biotsavart::{lambda_plus_with, voxelize, DomainShape, DomainSpec, PowerOptions, SpectralEstimate};
use helicert_core::certificates::{
    axisym_lambda_upper, ball_lambda_plus, certify as run_certificates, eigenvalue_bounds, helicity_energy_coefficient,
    solve_x0, CertificateReport, EigenvalueBounds, EnergyBound,
};
use helicert_core::curvegeom::{curvature_extrema, frenet, reach, CurveInput};
use helicert_core::surfaceflow::{
    length_inequality_check, pbar_qbar, poloidal_turn_markers, trace as trace_path, winding_limits, HarmonicBasis,
    LengthMargins, SurfaceAverages, SurfaceField, WindingEstimate,
};
use helicert_core::torusgeom::{GeometricConstants, StandardTorusInput, TubeInput, TubeSpec};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::fmt::Write as _;

#[derive(Serialize)]
struct X0Report {
    meta: Meta,
    x0: f64,
}

pub fn x0(args: &CommonArgs) -> Result<(), CliError> {
    let report = X0Report {
        meta: Meta::new(&json!({"command": "x0"}), None),
        x0: solve_x0(),
    };
    emit(&report, args.out.as_deref())
}

#[derive(Serialize)]
struct CurveInfoReport {
    meta: Meta,
    kappa_plus: f64,
    tau_plus: f64,
    reach: f64,
    length: f64,
    n: usize,
}

pub fn curve_info(args: &CurveInfoArgs) -> Result<(), CliError> {
    let (mut input, value): (CurveInput, Value) = read_json(&args.input)?;
    if args.n.is_some() {
        input.n = args.n;
    }
    let curve = input.build()?;
    let fr = frenet(&curve)?;
    let (kappa_plus, tau_plus) = curvature_extrema(&fr);
    let report = CurveInfoReport {
        meta: Meta::new(&json!({"command": "curve-info", "input": value, "n": args.n}), None),
        kappa_plus,
        tau_plus,
        reach: reach(&curve, &fr),
        length: curve.length(),
        n: curve.len(),
    };
    emit(&report, args.common.out.as_deref())
}

#[derive(Serialize)]
struct CertifyReport {
    meta: Meta,
    constants: GeometricConstants,
    certificates: Vec<CertificateReport>,
    eigenvalue_bounds: EigenvalueBounds,
}

pub fn certify(args: &CertifyArgs) -> Result<(), CliError> {
    let (input, value): (TubeInput, Value) = read_json(&args.input)?;
    let tube = input.build()?;
    let (constants, certificates) = run_certificates(&tube, args.crossing_number);
    let report = CertifyReport {
        meta: Meta::new(
            &json!({"command": "certify", "input": value, "crossing_number": args.crossing_number}),
            None,
        ),
        eigenvalue_bounds: eigenvalue_bounds(&constants, constants.volume),
        constants,
        certificates,
    };
    emit(&report, args.common.out.as_deref())
}

#[derive(Serialize)]
struct BoundCheck {
    name: &'static str,
    value: f64,
    bound_respected: bool,
    /// The bound assumes hypotheses on the eigenfield that are not verified numerically.
    conditional: bool,
}

#[derive(Serialize)]
struct SpectrumReport {
    meta: Meta,
    estimate: SpectralEstimate,
    volume: f64,
    voxel_volume: f64,
    bounds: Vec<BoundCheck>,
    /// `λ₊` of the ball with the same volume.
    ball_lambda_plus: f64,
    below_ball: bool,
}

fn tube_of(shape: &DomainShape) -> Result<Option<TubeSpec>, CliError> {
    Ok(match shape {
        DomainShape::Ball { .. } => None,
        DomainShape::StandardTorus { r, big_r } => Some(
            TubeInput {
                curve: None,
                radius: None,
                sections: None,
                torus: Some(StandardTorusInput { r: *r, big_r: *big_r }),
                n_phi: None,
            }
            .build()?,
        ),
        DomainShape::Tube(region) => Some(region.spec().clone()),
    })
}

pub fn spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let (spec, value): (DomainSpec, Value) = match (&args.input, &args.domain) {
        (Some(path), _) => read_json(path)?,
        (None, Some(text)) => parse_json(text, "--domain")?,
        (None, None) => return Err(CliError::Malformed("one of --input or --domain is required".into())),
    };
    let h = positive("h", args.h)?;
    let tol = positive("tol", args.tol)?;
    let shape = spec.shape()?;
    let dom = voxelize(shape.clone(), h)?;
    let opts = PowerOptions {
        tol,
        seed: args.seed,
        max_iter: args.max_iter,
        ..Default::default()
    };
    let (estimate, field) = lambda_plus_with(&dom, &opts)?;
    let v = shape.volume();
    let lam = estimate.lambda_plus;
    let check = |name, value: f64, conditional| BoundCheck {
        name,
        value,
        bound_respected: lam <= value,
        conditional,
    };
    let mut bounds = vec![
        check(
            "energy_coarse",
            helicity_energy_coefficient(v, EnergyBound::Coarse).expect("volume is positive"),
            false,
        ),
        check(
            "energy_sharp",
            helicity_energy_coefficient(v, EnergyBound::Sharp).expect("volume is positive"),
            false,
        ),
    ];
    if let Some(tube) = tube_of(&shape)? {
        if let Some(d) = tube.axis_distance() {
            bounds.push(check("axisymmetric", axisym_lambda_upper(v, d), true));
        }
        let gc = helicert_core::torusgeom::geometric_constants(&tube);
        let eb = eigenvalue_bounds(&gc, v);
        if let Some(t) = eb.tube_mu_lower.filter(|m| *m > 0.0) {
            bounds.push(check("eigenvalue_tube", 1.0 / t, true));
        }
        if eb.regular_mu_lower > 0.0 {
            bounds.push(check("eigenvalue_regular", 1.0 / eb.regular_mu_lower, true));
        }
    }
    if let Some(path) = &args.dump_field {
        let mut csv = String::from("x,y,z,bx,by,bz\n");
        for (p, b) in dom.centers().iter().zip(field.values()) {
            let row = [p.x, p.y, p.z, b.x, b.y, b.z].map(fmt_f64).join(",");
            writeln!(csv, "{row}").expect("writing to a String cannot fail");
        }
        write_text(path, &csv)?;
    }
    let ball = ball_lambda_plus(v).expect("volume is positive");
    let report = SpectrumReport {
        meta: Meta::new(
            &json!({"command": "spectrum", "input": value, "h": h, "tol": tol, "max_iter": args.max_iter}),
            Some(args.seed),
        ),
        volume: v,
        voxel_volume: dom.discrete_volume(),
        bounds,
        ball_lambda_plus: ball,
        below_ball: lam < ball,
        estimate,
    };
    emit(&report, args.common.out.as_deref())
}

/// A component is an expression string or a plain number.
#[derive(Deserialize)]
#[serde(untagged)]
enum Component {
    Text(String),
    Number(f64),
}

impl Component {
    fn expr(&self) -> String {
        match self {
            Component::Text(s) => s.clone(),
            Component::Number(v) => format!("{v:e}"),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldInput {
    fs: Component,
    fphi: Component,
}

#[derive(Serialize)]
struct TraceReport {
    meta: Meta,
    steps: usize,
    dt: f64,
    final_s: f64,
    final_phi: f64,
    length: f64,
    winding: Option<WindingEstimate>,
    /// Why `winding` is absent.
    winding_note: Option<String>,
    averages: SurfaceAverages,
    length_margins: Option<LengthMargins>,
    /// Hypotheses on the field beyond being nowhere vanishing are not checked.
    conditional: bool,
}

pub fn trace(args: &TraceArgs) -> Result<(), CliError> {
    let (input, tube_value): (TubeInput, Value) = read_json(&args.input)?;
    let (field_input, field_value): (FieldInput, Value) = parse_json(&args.field, "--field")?;
    let t_end = positive("T", args.t)?;
    let dt = positive("dt", args.dt)?;
    let tube = input.build()?;
    let field = SurfaceField::parse(&field_input.fs.expr(), &field_input.fphi.expr())?;
    let path = trace_path(&tube, &field, (args.s0, args.phi0), t_end, dt)?;

    if let Some(csv_path) = &args.csv {
        let mut csv = String::from("t,s,phi,x,y,z\n");
        for (k, p) in path.embedded(&tube).iter().enumerate() {
            let row = [path.times[k], path.s[k], path.phi[k], p.x, p.y, p.z]
                .map(fmt_f64)
                .join(",");
            writeln!(csv, "{row}").expect("writing to a String cannot fail");
        }
        write_text(csv_path, &csv)?;
    }

    let basis = if tube.standard_torus().is_some() {
        HarmonicBasis::Exact
    } else {
        HarmonicBasis::CoordinateProxy
    };
    let averages = pbar_qbar(&tube, &field, basis)?;
    let (winding, winding_note, length_margins) = match poloidal_turn_markers(&path) {
        Ok(markers) => {
            let margins = length_inequality_check(&tube, &path, &markers);
            match winding_limits(&path, &markers) {
                Ok(mut w) => {
                    w.pbar = Some(averages.pbar);
                    w.qbar = Some(averages.qbar);
                    (Some(w), None, Some(margins))
                }
                Err(e) => (None, Some(e.to_string()), Some(margins)),
            }
        }
        Err(e) => (None, Some(e.to_string()), None),
    };
    let last = path.len() - 1;
    let report = TraceReport {
        meta: Meta::new(
            &json!({
                "command": "trace", "input": tube_value, "field": field_value,
                "T": t_end, "dt": dt, "s0": args.s0, "phi0": args.phi0,
            }),
            None,
        ),
        steps: last,
        dt: path.times[1] - path.times[0],
        final_s: path.s[last],
        final_phi: path.phi[last],
        length: path.length[last],
        winding,
        winding_note,
        averages,
        length_margins,
        conditional: true,
    };
    emit(&report, args.common.out.as_deref())
}

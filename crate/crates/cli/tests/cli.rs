use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn helicert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_helicert"))
        .args(args)
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("helicert-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn verdict_of(report: &Value, certificate: &str) -> String {
    report["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["certificate"] == certificate)
        .map(|c| c["verdict"].as_str().unwrap().to_owned())
        .unwrap()
}

#[test]
fn x0_report() {
    let r = json_of(&helicert(&["x0"]));
    assert_eq!(r["x0"].as_f64().unwrap(), 4.493409457909064);
    assert_eq!(r["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(r["meta"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn curve_info_of_a_circle() {
    let p = scratch("circle.json", r#"{"type":"circle","radius":3}"#);
    let r = json_of(&helicert(&["curve-info", "--input", p.to_str().unwrap()]));
    assert!((r["kappa_plus"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-6);
    assert!(r["tau_plus"].as_f64().unwrap().abs() < 1e-9);
    assert!((r["reach"].as_f64().unwrap() - 3.0).abs() < 1e-6);
    assert!((r["length"].as_f64().unwrap() - 18.8496).abs() < 1e-4);
}

#[test]
fn certify_reports_verdicts_as_data() {
    let p = scratch("torus6.json", r#"{"torus":{"r":1,"R":6}}"#);
    let r = json_of(&helicert(&["certify", "--input", p.to_str().unwrap()]));
    assert_eq!(verdict_of(&r, "axisymmetric"), "NonOptimal");
    let c = &r["certificates"][0];
    assert!(c["lhs"].is_f64() && c["rhs"].is_f64() && c["direction"].is_string());

    let p = scratch("torus3.json", r#"{"torus":{"r":1,"R":3}}"#);
    let out = helicert(&["certify", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(verdict_of(&json_of(&out), "axisymmetric"), "Inconclusive");
}

#[test]
fn thin_trefoil_tube_is_certified() {
    let p = scratch(
        "trefoil.json",
        r#"{"curve":{"type":"torus_knot","p":2,"q":3,"R":2,"r":0.5},"radius":0.01}"#,
    );
    let r = json_of(&helicert(&[
        "certify",
        "--input",
        p.to_str().unwrap(),
        "--crossing-number",
        "3",
    ]));
    assert_eq!(verdict_of(&r, "tube"), "NonOptimal");
    let tube = r["certificates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["certificate"] == "tube")
        .unwrap();
    // L/R against 223/η³ recomputed from the echoed constants
    let gc = &r["constants"];
    let lhs = gc["L"].as_f64().unwrap() / gc["R"].as_f64().unwrap();
    let rhs = 223.0 / gc["eta"].as_f64().unwrap().powi(3);
    assert!((tube["lhs"].as_f64().unwrap() - lhs).abs() < 1e-9 * lhs);
    assert!((tube["rhs"].as_f64().unwrap() - rhs).abs() < 1e-9 * rhs);
}

#[test]
fn malformed_input_exits_2() {
    let p = scratch("bad.json", "{ not json");
    let out = helicert(&["certify", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    let out = helicert(&["certify", "--input", "/nonexistent/tube.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thick_tube_exits_3() {
    let p = scratch("thick.json", r#"{"curve":{"type":"circle","radius":1},"radius":1.5}"#);
    let out = helicert(&["certify", "--input", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn spectrum_rejects_bad_parameters() {
    let out = helicert(&[
        "spectrum",
        "--domain",
        r#"{"ball":{"r":1}}"#,
        "--h",
        "0.2",
        "--tol",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = helicert(&["spectrum", "--domain", r#"{"ball":{"r":1}}"#, "--h", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_helicert"))
        .args(["x0"])
        .env("HELICERT_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectrum_iteration_cap_exits_4() {
    let out = helicert(&[
        "spectrum",
        "--domain",
        r#"{"ball":{"r":1}}"#,
        "--h",
        "0.15",
        "--tol",
        "1e-12",
        "--max-iter",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ball_spectrum_near_reciprocal_root() {
    let r = json_of(&helicert(&[
        "spectrum",
        "--domain",
        r#"{"ball":{"r":1}}"#,
        "--h",
        "0.1",
    ]));
    let lam = r["estimate"]["lambda_plus"].as_f64().unwrap();
    let exact = 1.0 / 4.493409457909064;
    assert!((lam - exact).abs() < 0.05 * exact, "{lam}");
    for b in r["bounds"].as_array().unwrap() {
        assert_eq!(b["bound_respected"], true, "{b}");
    }
}

#[test]
fn torus_spectrum_is_below_ball_and_deterministic() {
    let p = scratch("torus6s.json", r#"{"torus":{"r":1,"R":6}}"#);
    let dump = std::env::temp_dir()
        .join(format!("helicert-cli-{}", std::process::id()))
        .join("field.csv");
    let args = [
        "spectrum",
        "--input",
        p.to_str().unwrap(),
        "--h",
        "0.34",
        "--seed",
        "7",
        "--dump-field",
        dump.to_str().unwrap(),
    ];
    let a = helicert(&args);
    let b = helicert(&args);
    assert_eq!(a.stdout, b.stdout);
    let r = json_of(&a);
    assert_eq!(r["meta"]["seed"], 7);
    assert_eq!(r["below_ball"], true);
    let cells = r["estimate"]["cells"].as_u64().unwrap() as usize;
    let csv = std::fs::read_to_string(dump).unwrap();
    assert_eq!(csv.lines().count(), cells + 1);
}

#[test]
fn trace_writes_one_row_per_step() {
    let p = scratch("torus3t.json", r#"{"torus":{"r":1,"R":3}}"#);
    let csv = std::env::temp_dir()
        .join(format!("helicert-cli-{}", std::process::id()))
        .join("path.csv");
    let args = [
        "trace",
        "--tube",
        p.to_str().unwrap(),
        "--field",
        r#"{"fs":"1","fphi":"3+cos(phi)"}"#,
        "--T",
        "20",
        "--dt",
        "0.001",
        "--csv",
        csv.to_str().unwrap(),
    ];
    let out = helicert(&args);
    let r = json_of(&out);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,s,phi,x,y,z"));
    assert_eq!(lines.count(), 20001);
    assert!(r["winding"]["a_hat"].as_f64().unwrap() > 0.0);
    assert_eq!(r["averages"]["basis"], "exact");
    assert!(r["length_margins"]["margins"]
        .as_array()
        .unwrap()
        .iter()
        .all(|m| m.as_f64().unwrap() >= 0.0));
    assert_eq!(helicert(&args).stdout, out.stdout);
}

#[test]
fn trace_rejects_bad_fields() {
    let p = scratch("torus3b.json", r#"{"torus":{"r":1,"R":3}}"#);
    for field in [r#"{"fs":"1"}"#, r#"{"fs":"1","fphi":"3+"}"#, "nope"] {
        let out = helicert(&[
            "trace",
            "--input",
            p.to_str().unwrap(),
            "--field",
            field,
            "--T",
            "1",
            "--dt",
            "0.01",
        ]);
        assert_eq!(out.status.code(), Some(2), "{field}");
    }
}

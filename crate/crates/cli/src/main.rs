//! `helicert`: certificates, spectral runs and field-line traces from JSON inputs.

mod commands;
mod report;

use clap::{Args, Parser, Subcommand};
use report::CliError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "helicert",
    version,
    about = "Helicity eigenvalue certificates for solid tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every applicable non-optimality certificate on a tube or torus.
    Certify(CertifyArgs),
    /// Largest positive eigenvalue of the discretised Biot-Savart operator.
    Spectrum(SpectrumArgs),
    /// Trace a field line on a torus boundary and estimate its winding.
    Trace(TraceArgs),
    /// Curvature, torsion, reach and length of a closed curve.
    CurveInfo(CurveInfoArgs),
    /// Smallest positive root of tan x = x.
    X0(CommonArgs),
}

#[derive(Debug, Args)]
struct CommonArgs {
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CertifyArgs {
    /// Tube JSON file.
    #[arg(long)]
    input: PathBuf,
    /// Crossing number of the core knot, enables the rope-length certificate.
    #[arg(long)]
    crossing_number: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SpectrumArgs {
    /// Domain JSON file, e.g. `{"ball":{"r":1}}`.
    #[arg(long, conflicts_with = "domain", required_unless_present = "domain")]
    input: Option<PathBuf>,
    /// Domain JSON given inline.
    #[arg(long)]
    domain: Option<String>,
    /// Lattice spacing.
    #[arg(long)]
    h: f64,
    /// Relative tolerance of the power iteration.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    /// Seed of the random starting field.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Iteration cap of the power iteration.
    #[arg(long, default_value_t = 2000)]
    max_iter: usize,
    /// Write the final eigenfield as CSV (x, y, z, bx, by, bz).
    #[arg(long)]
    dump_field: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct TraceArgs {
    /// Tube JSON file.
    #[arg(long, alias = "tube")]
    input: PathBuf,
    /// Field components as JSON, e.g. `{"fs":"1","fphi":"3+cos(phi)"}`.
    #[arg(long)]
    field: String,
    /// Duration.
    #[arg(long = "T")]
    t: f64,
    /// Step size; the step count is round(T/dt).
    #[arg(long)]
    dt: f64,
    /// Starting arc length.
    #[arg(long, default_value_t = 0.0)]
    s0: f64,
    /// Starting section angle.
    #[arg(long, default_value_t = 0.0)]
    phi0: f64,
    /// Write the path as CSV (t, s, phi, x, y, z).
    #[arg(long)]
    csv: Option<PathBuf>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct CurveInfoArgs {
    /// Curve JSON file, e.g. `{"type":"circle","radius":3}`.
    #[arg(long)]
    input: PathBuf,
    /// Number of arc-length samples, overriding the file.
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("HELICERT_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| CliError::Malformed(format!("HELICERT_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Malformed(e.to_string()))
}

fn run(cli: Cli) -> Result<(), CliError> {
    configure_threads()?;
    match cli.command {
        Command::Certify(a) => commands::certify(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::Trace(a) => commands::trace(&a),
        Command::CurveInfo(a) => commands::curve_info(&a),
        Command::X0(a) => commands::x0(&a),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

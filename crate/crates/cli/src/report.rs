use helicert_core::biotsavart::BiotSavartError;
use helicert_core::curvegeom::CurveError;
use helicert_core::surfaceflow::SurfaceFlowError;
use helicert_core::torusgeom::TubeError;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Malformed(String),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("invalid embedding: {0}")]
    Embedding(String),
    #[error("{0}")]
    NoConvergence(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Malformed(_) | CliError::Read { .. } => 2,
            CliError::Embedding(_) => 3,
            CliError::NoConvergence(_) => 4,
            CliError::Write { .. } | CliError::Failed(_) => 1,
        }
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::Malformed(e.to_string())
    }
}

impl From<TubeError> for CliError {
    fn from(e: TubeError) -> Self {
        match e {
            TubeError::Curve(c) => c.into(),
            TubeError::Malformed(_) => CliError::Malformed(e.to_string()),
            TubeError::EmbeddingInvalid(_) | TubeError::TubeTooThick { .. } => CliError::Embedding(e.to_string()),
        }
    }
}

impl From<BiotSavartError> for CliError {
    fn from(e: BiotSavartError) -> Self {
        match e {
            BiotSavartError::Tube(t) => t.into(),
            BiotSavartError::NoConvergence { .. } | BiotSavartError::SolverDiverged { .. } => {
                CliError::NoConvergence(e.to_string())
            }
            BiotSavartError::InvalidParameter(_)
            | BiotSavartError::EmptyDomain { .. }
            | BiotSavartError::TooFewCells { .. }
            | BiotSavartError::AxisIntersection { .. }
            | BiotSavartError::NotTorus => CliError::Malformed(e.to_string()),
        }
    }
}

impl From<SurfaceFlowError> for CliError {
    fn from(e: SurfaceFlowError) -> Self {
        match e {
            SurfaceFlowError::Parse(_)
            | SurfaceFlowError::InvalidParameter(_)
            | SurfaceFlowError::StepTooLarge { .. } => CliError::Malformed(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}

/// Run metadata embedded in every report.
#[derive(Debug, Serialize)]
pub struct Meta {
    pub version: &'static str,
    /// SHA-256 of the canonical JSON of the command, its parameters and its parsed input.
    pub config_hash: String,
    pub seed: Option<u64>,
}

impl Meta {
    pub fn new(config: &Value, seed: Option<u64>) -> Self {
        // serde_json maps are ordered by key, so the serialisation is canonical
        let bytes = serde_json::to_vec(config).expect("JSON values always serialise");
        Self {
            version: env!("CARGO_PKG_VERSION"),
            config_hash: hex::encode(Sha256::digest(&bytes)),
            seed,
        }
    }
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(T, Value), CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })?;
    parse_json(&text, &path.display().to_string())
}

pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<(T, Value), CliError> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Malformed(format!("{what}: {e}")))?;
    let parsed = T::deserialize(&value).map_err(|e| CliError::Malformed(format!("{what}: {e}")))?;
    Ok((parsed, value))
}

pub fn positive(name: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Malformed(format!("--{name} must be positive, got {v}")))
    }
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

/// Pretty JSON to `out`, or stdout when absent.
pub fn emit<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Failed(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => write_text(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

//! Input digests, run headers and the JSON/CSV writers.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

/// An input file as recorded in output headers: base name and SHA-256 of its bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputDigest {
    pub name: String,
    pub sha256: String,
}

/// Header embedded in every output file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunInfo {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
}

impl RunInfo {
    pub fn new(command: &'static str, config: Value) -> Self {
        RunInfo {
            tool: "innerfn",
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs: Vec::new(),
        }
    }
}

/// Reads and parses a JSON input, recording its digest.
pub fn read_json<T: DeserializeOwned>(path: &Path, info: &mut RunInfo) -> Result<T, CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let name = path.file_name().map_or_else(
        || path.display().to_string(),
        |n| n.to_string_lossy().into_owned(),
    );
    info.inputs.push(InputDigest {
        name,
        sha256: hex::encode(Sha256::digest(&bytes)),
    });
    serde_json::from_slice(&bytes).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
    }
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

/// Writes `body` (a JSON object) with the run header under `"provenance"`.
pub fn write_json(path: &Path, body: &impl Serialize, info: &RunInfo) -> Result<(), CliError> {
    let mut value = serde_json::to_value(body).map_err(|e| CliError::Output(e.to_string()))?;
    let header = serde_json::to_value(info).map_err(|e| CliError::Output(e.to_string()))?;
    match &mut value {
        Value::Object(map) => {
            map.insert("provenance".into(), header);
        }
        other => {
            let body = std::mem::take(other);
            *other = serde_json::json!({ "data": body, "provenance": header });
        }
    }
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| CliError::Output(e.to_string()))?;
    text.push('\n');
    write_bytes(path, text.as_bytes())
}

/// 17 significant digits; empty for a missing value.
pub fn num(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => format!("{v:.16e}"),
        Some(v) if v.is_nan() => "nan".into(),
        Some(v) if v > 0.0 => "inf".into(),
        Some(_) => "-inf".into(),
        None => String::new(),
    }
}

/// Writes `#`-prefixed header lines followed by RFC 4180 records with LF endings.
pub fn write_csv(
    path: &Path,
    info: &RunInfo,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut out = Vec::new();
    out.extend_from_slice(format!("# {} {}\n", info.tool, info.version).as_bytes());
    out.extend_from_slice(format!("# command: {}\n", info.command).as_bytes());
    let config =
        serde_json::to_string(&info.config).map_err(|e| CliError::Output(e.to_string()))?;
    out.extend_from_slice(format!("# config: {config}\n").as_bytes());
    for input in &info.inputs {
        out.extend_from_slice(
            format!("# input: {} sha256 {}\n", input.name, input.sha256).as_bytes(),
        );
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let err = |e: csv::Error| CliError::Output(e.to_string());
    w.write_record(header).map_err(err)?;
    for row in rows {
        w.write_record(&row).map_err(err)?;
    }
    let out = w
        .into_inner()
        .map_err(|e| CliError::Output(e.to_string()))?;
    write_bytes(path, &out)
}

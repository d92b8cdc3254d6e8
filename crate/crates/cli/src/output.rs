use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::args::Format;
use crate::error::CliError;

/// Numeric table with named columns.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: &[&'static str], rows: Vec<Vec<f64>>) -> Self {
        Self {
            header: header.to_vec(),
            rows,
        }
    }
}

/// What a command produces.
pub enum Output {
    Table(Table),
    /// JSON object; `pass = false` turns into exit code 1.
    Report {
        body: Value,
        pass: Option<bool>,
    },
}

/// Seventeen significant digits, so doubles round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String(x.to_string()), Value::Number)
}

fn csv_field(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !(n.is_i64() || n.is_u64()) => fmt_f64(x),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub fn render(out: &Output, format: Format) -> Result<String, CliError> {
    match (out, format) {
        (Output::Table(t), Format::Csv) => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&t.header)?;
            for row in &t.rows {
                w.write_record(row.iter().map(|&x| fmt_f64(x)))?;
            }
            Ok(
                String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                    .expect("csv output is utf-8"),
            )
        }
        (Output::Table(t), Format::Json) => {
            let records: Vec<Value> = t
                .rows
                .iter()
                .map(|row| {
                    let map: Map<String, Value> = t
                        .header
                        .iter()
                        .zip(row)
                        .map(|(k, &v)| (k.to_string(), json_number(v)))
                        .collect();
                    Value::Object(map)
                })
                .collect();
            Ok(serde_json::to_string_pretty(&records)? + "\n")
        }
        // Scalar fields only; nested data needs the JSON form.
        (Output::Report { body, .. }, Format::Csv) => {
            let scalars: Vec<(&String, &Value)> = body
                .as_object()
                .into_iter()
                .flatten()
                .filter(|(_, v)| !(v.is_object() || v.is_array()))
                .collect();
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(scalars.iter().map(|(k, _)| k.as_str()))?;
            w.write_record(scalars.iter().map(|(_, v)| csv_field(v)))?;
            Ok(
                String::from_utf8(w.into_inner().map_err(|e| e.into_error())?)
                    .expect("csv output is utf-8"),
            )
        }
        (Output::Report { body, .. }, Format::Json) => {
            Ok(serde_json::to_string_pretty(body)? + "\n")
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// Full argument list, replayed by `rerun`.
    pub flags: Vec<String>,
    pub seed: Option<u64>,
    pub artifact_version: String,
    /// Seconds since the epoch; `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
}

impl Manifest {
    pub fn new(command: String, flags: Vec<String>, seed: Option<u64>) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|s| s.parse().ok())
            .unwrap_or_else(|| {
                SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map_or(0, |d| d.as_secs())
            });
        Self {
            command,
            flags,
            seed,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: bad manifest: {e}", path.display())))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}

pub fn default_manifest_path(output: &Path) -> PathBuf {
    let mut s = output.as_os_str().to_owned();
    s.push(".manifest.json");
    PathBuf::from(s)
}

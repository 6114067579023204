//! Data-file writers: CSV with `#` metadata lines, JSON with the same
//! metadata object.
//!
//! Reruns with an identical config must produce byte-identical data files,
//! so nothing time-dependent is written here; the timestamp lives in the
//! run manifest only. Floats are written in scientific notation with 12
//! significant digits.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::CliError;

/// One resolved table: ordered metadata, a header and numeric rows.
#[derive(Debug, Clone, Serialize)]
pub struct Table {
    /// Ordered `(key, value)` metadata pairs.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

/// A table cell.
#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Value {
    Number(f64),
    Flag(bool),
    Text(String),
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Number(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Flag(v)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

impl Table {
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (key, value) in &self.metadata {
            let _ = writeln!(out, "# {key} = {value}");
        }
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|cell| match cell {
                    Value::Number(v) => format_number(*v),
                    Value::Flag(b) => b.to_string(),
                    Value::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct JsonTable<'a> {
            metadata: Vec<(&'a str, &'a str)>,
            columns: &'a [String],
            rows: &'a [Vec<Value>],
        }
        let doc = JsonTable {
            metadata: self
                .metadata
                .iter()
                .map(|(k, v)| (k.as_str(), v.as_str()))
                .collect(),
            columns: &self.columns,
            rows: &self.rows,
        };
        let mut text = serde_json::to_string_pretty(&doc).expect("table serializes");
        text.push('\n');
        text
    }

    pub fn write(&self, path: &Path, format: crate::config::OutputFormat) -> Result<(), CliError> {
        let text = match format {
            crate::config::OutputFormat::Csv => self.to_csv(),
            crate::config::OutputFormat::Json => self.to_json(),
        };
        fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
    }
}

/// Builder for the ordered metadata block shared by every output file.
pub struct Metadata {
    entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(config_hash: &str, mode: &str) -> Self {
        let mut m = Self {
            entries: Vec::new(),
        };
        m.text("generator", &format!("fourwave {}", env!("CARGO_PKG_VERSION")));
        m.text("config_hash", config_hash);
        m.text("mode", mode);
        m
    }

    pub fn text(&mut self, key: &str, value: &str) {
        self.entries.push((key.to_string(), value.to_string()));
    }

    pub fn number(&mut self, key: &str, value: f64) {
        self.entries.push((key.to_string(), format_number(value)));
    }

    /// Full resolved parameter set in rad/s, plus the derived rates.
    pub fn params(&mut self, p: &fourwave::SystemParams) {
        let mech = fourwave::response::mechanical_response(p);
        let margin = fourwave::response::stability_margin(p);
        self.number("params.omega_m_rad_s", p.omega_m);
        self.number("params.gamma_m_rad_s", p.gamma_m);
        self.number("params.kappa_rad_s", p.kappa);
        self.number("params.kappa_ex_rad_s", p.kappa_ex);
        self.number("params.omega_0_rad_s", p.omega_0);
        self.number("params.g_minus_rad_s", p.g_minus);
        self.number("params.g_plus_rad_s", p.g_plus);
        self.number("params.n_th", p.n_th);
        self.number("derived.kappa_0_rad_s", p.kappa_0());
        self.number("derived.delta_m_rad_s", p.delta_m());
        self.number("derived.gamma_eff_rad_s", mech.gamma_eff);
        self.number("derived.delta_m_eff_rad_s", mech.delta_m_eff);
        self.number("derived.g_plus_max_rad_s", margin.g_plus_max);
    }

    pub fn finish(self) -> Vec<(String, String)> {
        self.entries
    }
}

/// Writes the manifest next to the data file and returns its path.
pub fn write_manifest(manifest: &crate::RunManifest, data_path: &Path) -> Result<PathBuf, CliError> {
    let mut manifest_path = data_path.as_os_str().to_owned();
    manifest_path.push(".manifest.json");
    let manifest_path = PathBuf::from(manifest_path);
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&manifest_path, text)
        .map_err(|e| CliError::Io(format!("{}: {e}", manifest_path.display())))?;
    Ok(manifest_path)
}

//! Report rows and their CSV and JSON forms.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::Scenario;
use crate::error::{Error, Result};

/// One reported quantity. Rows with a tolerance are asserted: they pass iff
/// `abs_err ≤ tolerance`; rows without one are informational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub suite: String,
    pub fixture: String,
    pub quantity: String,
    pub value: f64,
    pub reference: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
    pub nodes: usize,
    pub millis: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl Row {
    fn base(quantity: impl Into<String>, value: f64) -> Self {
        Row {
            suite: String::new(),
            fixture: String::new(),
            quantity: quantity.into(),
            value,
            reference: None,
            abs_err: None,
            rel_err: None,
            tolerance: None,
            pass: None,
            nodes: 0,
            millis: 0,
            note: None,
        }
    }

    /// An asserted row: `|value − reference| ≤ tolerance`. NaN fails.
    pub fn check(quantity: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        let abs_err = (value - reference).abs();
        let mut r = Row::base(quantity, value);
        r.reference = Some(reference);
        r.abs_err = Some(abs_err);
        r.rel_err = (reference != 0.0).then(|| abs_err / reference.abs());
        r.tolerance = Some(tolerance);
        r.pass = Some(abs_err <= tolerance);
        r
    }

    /// An asserted residual: `value ≤ tolerance` with reference 0.
    pub fn residual(quantity: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Row::check(quantity, value, 0.0, tolerance)
    }

    pub fn info(quantity: impl Into<String>, value: f64) -> Self {
        Row::base(quantity, value)
    }

    /// An asserted row whose computation failed.
    pub fn failed(quantity: impl Into<String>, message: impl Into<String>) -> Self {
        let mut r = Row::base(quantity, f64::NAN);
        r.pass = Some(false);
        r.note = Some(message.into());
        r
    }

    pub fn with_reference(mut self, reference: f64) -> Self {
        let abs_err = (self.value - reference).abs();
        self.reference = Some(reference);
        self.abs_err = Some(abs_err);
        self.rel_err = (reference != 0.0).then(|| abs_err / reference.abs());
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn asserted(&self) -> bool {
        self.pass.is_some()
    }

    pub fn failed_assertion(&self) -> bool {
        self.pass == Some(false)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Environment {
    pub package: &'static str,
    pub version: &'static str,
    pub os: &'static str,
    pub arch: &'static str,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            package: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            os: std::env::consts::OS,
            arch: std::env::consts::ARCH,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub environment: Environment,
    pub config: Scenario,
    pub rows: Vec<Row>,
}

impl Report {
    pub fn new(config: Scenario, rows: Vec<Row>) -> Self {
        Report { environment: Environment::current(), config, rows }
    }

    pub fn all_pass(&self) -> bool {
        !self.rows.iter().any(Row::failed_assertion)
    }

    /// 0 when every asserted row passes, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_COLUMNS)?;
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            out.write_record([
                r.suite.clone(),
                r.fixture.clone(),
                r.quantity.clone(),
                r.value.to_string(),
                opt(r.reference),
                opt(r.abs_err),
                opt(r.rel_err),
                opt(r.tolerance),
                r.pass.map(|p| p.to_string()).unwrap_or_default(),
                r.nodes.to_string(),
                r.millis.to_string(),
            ])?;
        }
        out.flush().map_err(csv::Error::from)?;
        Ok(())
    }

    pub fn csv_string(&self) -> Result<String> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        Ok(String::from_utf8(buf).expect("csv output is utf-8"))
    }

    pub fn json_string(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    /// Writes `<prefix>.csv` and `<prefix>.json`.
    pub fn write_files(&self, prefix: &Path) -> Result<(PathBuf, PathBuf)> {
        let csv_path = with_suffix(prefix, "csv");
        let json_path = with_suffix(prefix, "json");
        if let Some(dir) = csv_path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| Error::Io { path: dir.into(), source })?;
        }
        std::fs::write(&csv_path, self.csv_string()?).map_err(|source| Error::Io { path: csv_path.clone(), source })?;
        std::fs::write(&json_path, self.json_string()).map_err(|source| Error::Io { path: json_path.clone(), source })?;
        Ok((csv_path, json_path))
    }
}

pub const CSV_COLUMNS: [&str; 11] =
    ["suite", "fixture", "quantity", "value", "reference", "abs_err", "rel_err", "tolerance", "pass", "nodes", "millis"];

fn with_suffix(prefix: &Path, ext: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

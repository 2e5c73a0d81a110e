//! Report assembly, atomic JSON output, and CSV series emission.
//!
//! Reports are deterministic for a fixed config and seed: maps serialize
//! with sorted keys and the only varying field is `wall_time_ms`.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::config::{ConfigError, InputDigest, Result};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl Check {
    pub fn pass(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: Value) -> Self {
        Check {
            name: name.into(),
            pass: false,
            witness: Some(witness),
        }
    }

    pub fn from_bool(name: impl Into<String>, pass: bool, witness: Value) -> Self {
        if pass {
            Check::pass(name)
        } else {
            Check::fail(name, witness)
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub params: Value,
    pub inputs: Vec<InputDigest>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub checks: Vec<Check>,
    pub certificates: Value,
    pub pass: bool,
    pub wall_time_ms: u128,
}

impl Report {
    pub fn new(command: &str, params: Value, inputs: Vec<InputDigest>, seed: Option<u64>) -> Self {
        Report {
            tool: "zdm",
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            params,
            inputs,
            seed,
            checks: Vec::new(),
            certificates: Value::Null,
            pass: true,
            wall_time_ms: 0,
        }
    }

    pub fn push(&mut self, check: Check) {
        self.pass &= check.pass;
        self.checks.push(check);
    }

    pub fn finish(mut self, started: Instant) -> Self {
        self.wall_time_ms = started.elapsed().as_millis();
        self
    }
}

/// Writes through a temporary file in the same directory, then renames,
/// so readers never observe a partial file.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io = |e: std::io::Error| ConfigError(format!("cannot write {}: {e}", path.display()));
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(format!(".{}.tmp", std::process::id()));
    let tmp = std::path::PathBuf::from(tmp);
    let mut file = std::fs::File::create(&tmp).map_err(io)?;
    file.write_all(bytes).map_err(io)?;
    file.sync_all().map_err(io)?;
    std::fs::rename(&tmp, path).map_err(io)
}

/// Writes the report to `--out` or stdout.
pub fn emit_report(report: &Report, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| ConfigError(format!("cannot serialize report: {e}")))?;
    text.push('\n');
    match out {
        Some(path) => write_atomic(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// One CSV file worth of series data.
pub struct Series {
    pub file: String,
    pub header: &'static str,
    pub rows: Vec<String>,
}

impl Series {
    pub fn new(file: impl Into<String>, header: &'static str) -> Self {
        Series {
            file: file.into(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }
}

/// Emits each nonempty series as a CSV under `--plot-dir`. Without the
/// flag, or with nothing to plot, no files appear.
pub fn emit_series(dir: Option<&Path>, series: &[Series]) -> Result<()> {
    let Some(dir) = dir else { return Ok(()) };
    let nonempty: Vec<&Series> = series.iter().filter(|s| !s.rows.is_empty()).collect();
    if nonempty.is_empty() {
        return Ok(());
    }
    std::fs::create_dir_all(dir)
        .map_err(|e| ConfigError(format!("cannot create {}: {e}", dir.display())))?;
    for s in nonempty {
        let mut text = String::with_capacity(s.rows.len() * 24 + s.header.len() + 1);
        text.push_str(s.header);
        text.push('\n');
        for row in &s.rows {
            text.push_str(row);
            text.push('\n');
        }
        write_atomic(&dir.join(&s.file), text.as_bytes())?;
    }
    Ok(())
}

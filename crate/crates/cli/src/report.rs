//! JSON report envelope and CSV curves.
//!
//! Reports contain no timestamps or runtimes, so identical inputs give
//! byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::Mode;

pub const SCHEMA: &str = "admwex-report";
pub const SCHEMA_VERSION: u32 = 1;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Everything that identifies a run.
#[derive(Debug, Clone)]
pub struct Run {
    pub command: &'static str,
    pub mode: Mode,
    pub tol: f64,
    pub seed: u64,
    pub config_sha256: String,
    pub config_echo: Value,
}

impl Run {
    pub fn new(command: &'static str, mode: Mode, tol: f64, seed: u64, config_text: &str) -> Result<Run> {
        let echo: toml::Table = toml::from_str(config_text).context("config echo")?;
        Ok(Run {
            command,
            mode,
            tol,
            seed,
            config_sha256: sha256_hex(config_text.as_bytes()),
            config_echo: serde_json::to_value(echo)?,
        })
    }

    /// First 16 hex digits of a hash over the config hash and the run flags.
    pub fn report_id(&self) -> String {
        let key = format!("{}\n{}\n{}\n{}\n{:e}", self.config_sha256, self.command, self.mode.label(), self.seed, self.tol);
        sha256_hex(key.as_bytes())[..16].to_string()
    }

    pub fn stem(&self) -> String {
        format!("{}-{}", self.command, self.report_id())
    }
}

/// A one-variable curve.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

impl Curve {
    pub fn new(header: &[&'static str]) -> Curve {
        Curve { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r.iter().map(|v| v.to_string()))?;
        }
        Ok(w.into_inner().map_err(|e| anyhow::anyhow!("csv buffer: {e}"))?)
    }
}

/// Command result before it is wrapped and written.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub payload: Value,
    pub curve: Option<Curve>,
    pub exit: i32,
}

pub fn envelope(run: &Run, outcome: &Outcome, csv_name: Option<&str>) -> Value {
    json!({
        "schema": SCHEMA,
        "schema_version": SCHEMA_VERSION,
        "tool": { "name": "admwex", "version": env!("CARGO_PKG_VERSION") },
        "command": run.command,
        "report_id": run.report_id(),
        "config_sha256": run.config_sha256,
        "config": run.config_echo,
        "provenance": { "mode": run.mode.label(), "tol": run.tol, "seed": run.seed },
        "exit_code": outcome.exit,
        "csv": csv_name,
        "payload": outcome.payload,
    })
}

pub fn render(v: &Value) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

/// Writes the report (and curve, when asked) under `dir`; returns the report path.
pub fn write_files(dir: &Path, run: &Run, outcome: &Outcome, with_csv: bool) -> Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let stem = run.stem();
    let csv_name = match (&outcome.curve, with_csv) {
        (Some(curve), true) => {
            let name = format!("{stem}.csv");
            fs::write(dir.join(&name), curve.to_csv()?).with_context(|| format!("writing {name}"))?;
            Some(name)
        }
        _ => None,
    };
    let path = dir.join(format!("{stem}.json"));
    let text = render(&envelope(run, outcome, csv_name.as_deref()))?;
    fs::File::create(&path)
        .and_then(|mut f| f.write_all(text.as_bytes()))
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

//! Reports and tables written by every subcommand.

use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;

use crate::config::Format;

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    pub fn flag(name: impl Into<String>, passed: bool) -> Self {
        Check { name: name.into(), passed, value: None, tolerance: None, detail: None }
    }

    /// Passes when `value ≤ tolerance`; NaN fails.
    pub fn bound(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), passed: value <= tolerance, value: Some(value), tolerance: Some(tolerance), detail: None }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub seed: u64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub data: Value,
}

/// Numeric columns, written as CSV or as a JSON object.
#[derive(Clone, Debug, Serialize)]
pub struct Table {
    #[serde(skip)]
    pub name: &'static str,
    pub seed: u64,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

pub struct Outcome {
    pub report: Report,
    pub tables: Vec<Table>,
}

impl Outcome {
    pub fn new(command: &'static str, seed: u64, checks: Vec<Check>, data: Value) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Outcome { report: Report { command, seed, passed, checks, data }, tables: Vec::new() }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_csv<W: Write>(table: &Table, mut out: W) -> Result<()> {
    writeln!(out, "# seed={}", table.seed)?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_outputs(outcome: &Outcome, dir: &Path, format: Format) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let report = dir.join(format!("{}.json", outcome.report.command));
    std::fs::write(&report, to_json(&outcome.report)?).with_context(|| format!("writing {}", report.display()))?;
    for table in &outcome.tables {
        let path = match format {
            Format::Csv => dir.join(format!("{}.csv", table.name)),
            Format::Json => dir.join(format!("{}.json", table.name)),
        };
        let file = std::fs::File::create(&path).with_context(|| format!("writing {}", path.display()))?;
        match format {
            Format::Csv => write_csv(table, std::io::BufWriter::new(file))?,
            Format::Json => std::io::BufWriter::new(file).write_all(to_json(table)?.as_bytes())?,
        }
    }
    Ok(())
}

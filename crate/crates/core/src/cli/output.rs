//! Rendering of command results as CSV or JSON, and the run manifest.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::config::Format;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Shortest round-trip decimal; `inf`, `-inf` and `NaN` for the rest.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub operation: &'static str,
    /// Parameters echoed in the CSV header.
    pub params: BTreeMap<String, String>,
    pub table: Table,
    pub result: Value,
    /// `None` for commands that only report.
    pub passed: Option<bool>,
    /// Human-readable lines for the terminal.
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub tool_version: String,
    pub operation: String,
    pub config_sha256: String,
    pub seed: u64,
}

fn verdict_word(passed: Option<bool>) -> &'static str {
    match passed {
        Some(true) => "PASS",
        Some(false) => "FAIL",
        None => "none",
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn render_csv(out: &CommandOutput, header: &RunHeader) -> String {
    let mut s = String::new();
    s.push_str(&format!("# momentray {}\n", header.tool_version));
    s.push_str(&format!("# operation: {}\n", header.operation));
    s.push_str(&format!("# config_sha256: {}\n", header.config_sha256));
    s.push_str(&format!("# seed: {}\n", header.seed));
    for (k, v) in &out.params {
        s.push_str(&format!("# param {k}: {v}\n"));
    }
    s.push_str(&format!("# verdict: {}\n", verdict_word(out.passed)));
    let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",");
    s.push_str(&line(&out.table.columns));
    s.push('\n');
    for row in &out.table.rows {
        s.push_str(&line(row));
        s.push('\n');
    }
    s
}

pub fn render_json(out: &CommandOutput, header: &RunHeader) -> String {
    let doc = serde_json::json!({
        "header": header,
        "params": out.params,
        "verdict": verdict_word(out.passed),
        "result": out.result,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("output serialises");
    s.push('\n');
    s
}

pub fn render(out: &CommandOutput, header: &RunHeader, format: Format) -> String {
    match format {
        Format::Csv => render_csv(out, header),
        Format::Json => render_json(out, header),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub path: String,
    pub sha256: String,
    pub bytes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config_sha256: String,
    pub seed: u64,
    pub tool_version: String,
    pub operation: String,
    pub workers: usize,
    pub verdict: String,
    pub outputs: Vec<OutputRecord>,
    pub wall_time_s: f64,
}

impl RunManifest {
    pub fn new(header: &RunHeader, workers: usize, passed: Option<bool>, wall_time_s: f64) -> Self {
        RunManifest {
            config_sha256: header.config_sha256.clone(),
            seed: header.seed,
            tool_version: header.tool_version.clone(),
            operation: header.operation.clone(),
            workers,
            verdict: verdict_word(passed).to_string(),
            outputs: Vec::new(),
            wall_time_s,
        }
    }

    pub fn record(&mut self, path: &str, content: &str) {
        self.outputs.push(OutputRecord {
            path: path.to_string(),
            sha256: hex::encode(Sha256::digest(content.as_bytes())),
            bytes: content.len(),
        });
    }
}

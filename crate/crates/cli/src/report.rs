//! Reports and their JSON / CSV encodings.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::{Experiment, ExperimentConfig, Format};
use crate::error::CliError;

pub const TOOL: &str = "wwlab";

/// One CSV row: a (sample, N) record of an experiment.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CsvRecord {
    pub experiment: String,
    pub system: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub sample_index: usize,
    pub value_re: f64,
    pub value_im: f64,
    pub grid_max: Option<f64>,
    pub certified_upper: Option<f64>,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: Experiment,
    pub system: String,
    pub seed: u64,
    pub config: ExperimentConfig,
    pub results: serde_json::Value,
    pub verdicts: BTreeMap<String, bool>,
    pub passed: bool,
    pub wall_clock_ms: Option<u64>,
    #[serde(skip)]
    pub records: Vec<CsvRecord>,
}

impl ExperimentReport {
    pub fn to_json(&self) -> Result<String, CliError> {
        let mut s = serde_json::to_string_pretty(self)
            .map_err(|e| CliError::Io(format!("cannot encode report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        if self.records.is_empty() {
            w.write_record(CSV_HEADER).map_err(csv_error)?;
        }
        for r in &self.records {
            w.serialize(r).map_err(csv_error)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| CliError::Io(format!("cannot encode csv: {e}")))?;
        String::from_utf8(bytes).map_err(|e| CliError::Io(format!("cannot encode csv: {e}")))
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
        }
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "experiment",
    "system",
    "N",
    "sample_index",
    "value_re",
    "value_im",
    "grid_max",
    "certified_upper",
    "seed",
];

fn csv_error(e: csv::Error) -> CliError {
    CliError::Io(format!("cannot encode csv: {e}"))
}

/// Writes the rendered report to `path`, or to standard output when absent.
pub fn emit_report(
    report: &ExperimentReport,
    format: Format,
    path: Option<&Path>,
) -> Result<(), CliError> {
    let text = report.render(format)?;
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

//! Seeded, reproducible experiment runner for `wwlab-core`.

pub mod config;
pub mod error;
pub mod experiments;
pub mod report;
pub mod suite;

use std::time::Instant;

pub use config::{Experiment, ExperimentConfig, Format};
pub use error::CliError;
pub use report::{emit_report, CsvRecord, ExperimentReport};

/// Runs the configured experiment. Everything except `wall_clock_ms` is a
/// function of the configuration alone.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport, CliError> {
    let experiment = config.experiment()?;
    let start = Instant::now();
    let outcome = match experiment {
        Experiment::Report => suite::run_suite(config)?,
        other => experiments::run(config, other)?,
    };
    let mut echo = config.clone();
    echo.out = None;
    echo.timing = false;
    Ok(ExperimentReport {
        tool: report::TOOL,
        version: env!("CARGO_PKG_VERSION"),
        experiment,
        system: config.system_name().to_string(),
        seed: config.seed(),
        config: echo,
        results: outcome.results,
        passed: outcome.verdicts.values().all(|v| *v),
        verdicts: outcome.verdicts,
        wall_clock_ms: config.timing.then(|| start.elapsed().as_millis() as u64),
        records: outcome.records,
    })
}

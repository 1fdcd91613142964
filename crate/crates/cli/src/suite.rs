//! The `report` experiment: a fixed battery of smaller runs of every other
//! experiment, summarised by their verdicts.

use serde_json::{json, Value};

use crate::config::{Experiment, ExperimentConfig};
use crate::error::CliError;
use crate::experiments::{self, Outcome};

fn entry(name: &str, experiment: Experiment, json: Value) -> (String, ExperimentConfig) {
    let mut cfg: ExperimentConfig = serde_json::from_value(json).expect("suite configs are valid");
    cfg.experiment = Some(experiment);
    (name.to_string(), cfg)
}

/// The battery, with `seed` and `samples` taken from the caller.
pub fn suite_configs(base: &ExperimentConfig) -> Vec<(String, ExperimentConfig)> {
    let ladder = [256, 1024, 4096];
    let mut list = vec![
        entry(
            "ww_decay_doubling",
            Experiment::Ww,
            json!({ "system": "doubling", "ladder": ladder }),
        ),
        entry(
            "ww_persist_rotation",
            Experiment::Ww,
            json!({ "system": "rotation", "which": "persist", "ladder": ladder }),
        ),
        entry(
            "ww_power3_doubling",
            Experiment::Ww,
            json!({ "system": "doubling", "f2": "1", "a": 3, "b": 3, "ladder": ladder }),
        ),
        entry(
            "ww_cl_inequality",
            Experiment::Ww,
            json!({ "system": "doubling", "which": "cl", "ladder": ladder, "h": 200 }),
        ),
        entry(
            "seminorm_ghk2_rotation",
            Experiment::Seminorm,
            json!({ "system": "rotation", "h": 1000 }),
        ),
        entry(
            "seminorm_power_rotation",
            Experiment::Seminorm,
            json!({ "system": "rotation", "which": "power", "a": 3, "h": 1000 }),
        ),
        entry(
            "spectral_rotation",
            Experiment::Spectral,
            json!({ "system": "rotation", "h": 2000, "t": 0.618_033_988_749_894_8 }),
        ),
        entry(
            "kernel_cyclic",
            Experiment::KernelCheck,
            json!({ "n": 20000 }),
        ),
        entry(
            "resonance_rotation",
            Experiment::KernelCheck,
            json!({ "which": "resonance" }),
        ),
        entry(
            "ineq_random",
            Experiment::Ineq,
            json!({ "trials": 100, "n": 128 }),
        ),
        entry(
            "maxisom_doubling",
            Experiment::Maxisom,
            json!({ "system": "doubling", "n": 4096 }),
        ),
        entry("lift_rational", Experiment::Lift, json!({ "trials": 20 })),
        entry("lift_twist", Experiment::Lift, json!({ "which": "twist" })),
        entry("nil_leibman", Experiment::Nil, json!({})),
        entry("nil_cl", Experiment::Nil, json!({ "which": "cl" })),
        entry(
            "weyl_quadratic",
            Experiment::Weyl,
            json!({ "threshold": 0.05 }),
        ),
    ];
    for (_, cfg) in &mut list {
        cfg.seed = base.seed;
        if base.samples.is_some() && cfg.samples.is_none() {
            cfg.samples = base.samples;
        }
    }
    list
}

pub fn run_suite(base: &ExperimentConfig) -> Result<Outcome, CliError> {
    let mut out = Outcome::default();
    let mut rows = Vec::new();
    for (name, cfg) in suite_configs(base) {
        let experiment = cfg.experiment()?;
        let o = experiments::run(&cfg, experiment)?;
        for (k, v) in &o.verdicts {
            out.verdicts.insert(format!("{name}.{k}"), *v);
        }
        rows.push(json!({
            "name": name,
            "experiment": experiment.name(),
            "config": serde_json::to_value(&cfg).expect("configs serialise"),
            "verdicts": serde_json::to_value(&o.verdicts).expect("verdicts serialise"),
            "passed": o.verdicts.values().all(|v| *v),
        }));
        out.records.extend(o.records);
    }
    out.results = json!({ "runs": rows });
    Ok(out)
}

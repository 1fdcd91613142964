mod common;

use common::wwlab;
use serde_json::Value;

fn json(out: &std::process::Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn empty_config_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.json");
    std::fs::write(&path, "{}").unwrap();
    let out = wwlab(&["--config", path.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no experiment"));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"experiment":"ww","sytem":"doubling"}"#).unwrap();
    assert_eq!(
        wwlab(&["--config", path.to_str().unwrap()], None)
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn malformed_observable_exits_with_usage_code() {
    let out = wwlab(&["ww", "--f1", "cos:", "-N", "10"], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn csv_has_one_row_per_sample_and_rung() {
    let out = wwlab(
        &[
            "ww",
            "--system",
            "doubling",
            "--ladder",
            "32,64,128,256",
            "--samples",
            "5",
            "--format",
            "csv",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(0));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "N"));
    assert_eq!(reader.records().count(), 5 * 4);
}

#[test]
fn written_reports_are_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let files: Vec<_> = (0..2)
        .map(|i| dir.path().join(format!("run{i}.json")))
        .collect();
    for (i, f) in files.iter().enumerate() {
        let threads = if i == 0 { 1 } else { 3 };
        let out = wwlab(
            &[
                "ww",
                "--system",
                "doubling",
                "--ladder",
                "64,128,256",
                "--samples",
                "4",
                "--out",
                f.to_str().unwrap(),
            ],
            Some(threads),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    assert_eq!(
        std::fs::read(&files[0]).unwrap(),
        std::fs::read(&files[1]).unwrap()
    );
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    std::fs::write(
        &path,
        r#"{"system":"doubling","ladder":[64,128,256],"samples":3,"seed":1}"#,
    )
    .unwrap();
    let out = wwlab(
        &["ww", "--config", path.to_str().unwrap(), "--seed", "99"],
        None,
    );
    let report = json(&out);
    assert_eq!(report["seed"], 99);
    assert_eq!(report["config"]["samples"], 3);
    assert_eq!(report["system"], "doubling");
}

#[test]
fn failing_verdict_exits_with_one() {
    let out = wwlab(
        &[
            "ww",
            "--system",
            "rotation",
            "--which",
            "decay",
            "--ladder",
            "64,128,256",
            "--samples",
            "3",
        ],
        None,
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert_eq!(report["passed"], false);
}

#[test]
fn timing_is_opt_in() {
    let args = ["weyl", "--ladder", "256,512"];
    assert!(json(&wwlab(&args, None))["wall_clock_ms"].is_null());
    let mut timed = args.to_vec();
    timed.push("--timing");
    assert!(json(&wwlab(&timed, None))["wall_clock_ms"].is_number());
}

#[test]
fn every_experiment_is_listed_in_help() {
    let help = String::from_utf8(wwlab(&["--help"], None).stdout).unwrap();
    for name in [
        "ww",
        "seminorm",
        "spectral",
        "kernel-check",
        "ineq",
        "maxisom",
        "lift",
        "nil",
        "weyl",
        "report",
    ] {
        assert!(help.contains(name), "{name}");
    }
}

#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("golden")
}

pub struct GoldenCase {
    pub name: String,
    pub config: PathBuf,
    pub expected: PathBuf,
}

pub fn golden_cases() -> Vec<GoldenCase> {
    let mut cases: Vec<GoldenCase> = std::fs::read_dir(golden_dir())
        .expect("golden directory")
        .filter_map(|e| {
            let path = e.ok()?.path();
            let name = path
                .file_name()?
                .to_str()?
                .strip_suffix(".config.json")?
                .to_string();
            let text = std::fs::read_to_string(&path).ok()?;
            let ext = if text.contains("\"format\":\"csv\"") {
                "csv"
            } else {
                "json"
            };
            Some(GoldenCase {
                expected: golden_dir().join(format!("{name}.{ext}")),
                name,
                config: path,
            })
        })
        .collect();
    cases.sort_by(|a, b| a.name.cmp(&b.name));
    cases
}

pub fn wwlab(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_wwlab"));
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("WWLAB_THREADS", n.to_string()),
        None => cmd.env_remove("WWLAB_THREADS"),
    };
    cmd.output().expect("run wwlab")
}

pub fn run_case(case: &GoldenCase, threads: usize) -> Output {
    wwlab(&["--config", case.config.to_str().unwrap()], Some(threads))
}

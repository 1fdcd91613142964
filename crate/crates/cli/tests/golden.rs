//! Golden reports for every subcommand. `UPDATE_GOLDEN=1 cargo test` rewrites
//! the expected files.

mod common;

use common::{golden_cases, run_case};

#[test]
fn every_subcommand_has_a_golden_case() {
    let cases = golden_cases();
    for sub in [
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
        let needle = format!("\"experiment\":\"{sub}\"");
        assert!(
            cases.iter().any(|c| std::fs::read_to_string(&c.config)
                .unwrap()
                .contains(&needle)),
            "no golden case for {sub}"
        );
    }
}

#[test]
fn reports_match_golden_files() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for case in golden_cases() {
        let out = run_case(&case, 1);
        assert!(
            out.status.success(),
            "{}: {}",
            case.name,
            String::from_utf8_lossy(&out.stderr)
        );
        if update {
            std::fs::write(&case.expected, &out.stdout).unwrap();
            continue;
        }
        let expected = std::fs::read(&case.expected).unwrap_or_else(|_| {
            panic!(
                "missing {}; run with UPDATE_GOLDEN=1",
                case.expected.display()
            )
        });
        assert!(
            out.stdout == expected,
            "{} differs from {}",
            case.name,
            case.expected.display()
        );
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    for case in golden_cases() {
        let one = run_case(&case, 1);
        let four = run_case(&case, 4);
        assert!(
            one.stdout == four.stdout,
            "{} differs between 1 and 4 workers",
            case.name
        );
    }
}

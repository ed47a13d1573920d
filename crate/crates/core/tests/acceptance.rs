//! Acceptance criteria 1–10 with pinned tolerances.
//!
//! Prints one verdict line per criterion and exits non-zero if any fails.
//! `ACCEPTANCE_ONLY=3,7` restricts the run to the listed criteria.

use std::process::ExitCode;

use tensor_radon::suite::run_selected;

fn main() -> ExitCode {
    let ids: Vec<usize> = std::env::var("ACCEPTANCE_ONLY")
        .ok()
        .map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect())
        .unwrap_or_default();
    let verbose = std::env::var_os("ACCEPTANCE_VERBOSE").is_some();
    let mut failed = 0;
    for r in run_selected(&ids) {
        println!("{}", r.line());
        for (label, v) in &r.details {
            if verbose || !r.passed {
                println!("        {label}: {v:.3e}");
            }
        }
        failed += usize::from(!r.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

//! Acceptance suite at full scale: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so the lines are always printed.

use std::process::ExitCode;

use multistable::cli::verify::{run_checks, VerifySettings, ALL_CRITERIA};

fn main() -> ExitCode {
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let settings = VerifySettings::full(0, workers);
    println!("acceptance: {} criteria, seed 0, {workers} worker(s)", ALL_CRITERIA.len());
    let outcomes = match run_checks(&settings) {
        Ok(o) => o,
        Err(e) => {
            println!("acceptance: aborted: {e}");
            return ExitCode::FAILURE;
        }
    };
    for o in &outcomes {
        println!("{}", o.summary_line());
    }
    let failed: Vec<u8> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.criterion).collect();
    if failed.is_empty() {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}

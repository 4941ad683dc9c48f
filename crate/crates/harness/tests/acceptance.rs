//! Runs every acceptance criterion at its stated tolerance and prints one
//! line per criterion. Exits nonzero if any criterion fails.

use std::process::ExitCode;

use fraclog_harness::check::{run_acceptance, CRITERIA, DETERMINISM_INDEX};

const SEED: u64 = 20240611;

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let outcomes = match run_acceptance(dir.path(), SEED) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("acceptance suite could not run: {e:#}");
            return ExitCode::FAILURE;
        }
    };
    println!("\nrunning {} acceptance criteria", outcomes.len());
    for o in &outcomes {
        println!("{o}");
    }
    assert_eq!(outcomes.len(), CRITERIA.len() + 1);
    assert_eq!(outcomes.last().map(|o| o.index), Some(DETERMINISM_INDEX));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("acceptance: {} passed, {failed} failed\n", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

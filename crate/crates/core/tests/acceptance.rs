//! One line per acceptance criterion; exits nonzero if any criterion fails.
//! Runs without the libtest harness so the lines are never captured.

use entgeo::verify::{run_suite, SUITES};

fn main() {
    let seed = std::env::var("ENTGEO_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(2024);
    println!("acceptance criteria, seed {seed}");
    let mut failed = Vec::new();
    for name in SUITES {
        let outcome = run_suite(name, seed).expect("known suite");
        println!("{}", outcome.line());
        if !outcome.passed {
            failed.push(outcome.id);
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", SUITES.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

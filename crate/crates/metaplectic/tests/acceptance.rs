//! Acceptance criteria 1 to 9, one PASS/FAIL line each. Runs without the test
//! harness so the lines always reach stdout.

use metaplectic::checks::acceptance_suite;

const SEED: u64 = 20240601;

fn main() {
    let outcomes = acceptance_suite(SEED);
    assert_eq!(outcomes.len(), 9);
    let mut failed = 0;
    for (k, o) in outcomes.iter().enumerate() {
        println!("criterion {}: {}", k + 1, o.line());
        if !o.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed (seed {})", 9 - failed, SEED);
    if failed > 0 {
        std::process::exit(1);
    }
}

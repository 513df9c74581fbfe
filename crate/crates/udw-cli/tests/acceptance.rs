//! Acceptance suite: every criterion at its stated tolerance, one line each.
//!
//! Criteria listed in `EXPECTED_FAILURES` are known not to hold as stated;
//! they still run and print FAIL, and the target only errors if one of them
//! starts passing (so the list can't go stale) or any other criterion fails.

use std::process::ExitCode;

use udw_cli::verify::{self, VerifyOptions, EXPECTED_FAILURES};

fn main() -> ExitCode {
    let opts = VerifyOptions {
        seed: 2024,
        ..VerifyOptions::default()
    };
    let results = verify::run(opts, &[]);
    let mut unexpected = Vec::new();
    for r in &results {
        println!("{r}");
        let expected_fail = EXPECTED_FAILURES.contains(&r.id);
        if r.passed == expected_fail {
            unexpected.push(r.id);
        }
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!(
        "acceptance: {passed}/{} passed, expected failures {:?}, unexpected outcomes {:?}",
        results.len(),
        EXPECTED_FAILURES,
        unexpected
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

// Runs the oracle suite behind `ghz-star verify`.

use ghz_star::verify::{run_verification, VerifyOptions};

pub fn run_example() -> ghz_star::Result<()> {
    let report = run_verification(&VerifyOptions::default())?;
    for c in &report.checks {
        println!("{} {:<62} {:.2e} (tolerance {:.0e})", if c.passed { "ok  " } else { "FAIL" }, c.name, c.observed, c.tolerance);
    }
    println!("all passed: {} in {:.1}s", report.all_passed, report.runtime_seconds);
    Ok(())
}

fn main() -> ghz_star::Result<()> {
    run_example()
}

//! A reduced run of the Monte-Carlo theorem suites, printed as JSON.
//!
//! Run with `cargo run --release --example theorem_suites`.

use qrs::bench::{estimate_runtime, verify_theorems, ExperimentConfig, VerifyConfig};

fn main() -> qrs::Result<()> {
    let cfg = ExperimentConfig {
        verify: VerifyConfig {
            completeness_k: vec![10, 50],
            soundness_k: vec![200],
            soundness_trials: 1_000,
            rms_m: vec![100, 1_000],
            ..VerifyConfig::default()
        },
        ..ExperimentConfig::default()
    };
    println!("estimated single-core runtime: {:.1} s", estimate_runtime(&cfg.verify));
    let report = verify_theorems(&cfg, 6)?;
    for s in &report.suites {
        println!("{:<18} {}", s.name, if s.passed { "pass" } else { "FAIL" });
        for c in &s.checks {
            println!("    {:<55} observed {:.5} (sigma {:.1e})", c.label, c.observed, c.sigma);
        }
    }
    println!("all passed: {}", report.passed);
    Ok(())
}

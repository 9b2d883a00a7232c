//! Protocol simulation written to disk: client transcripts, server-only
//! transcripts and a per-run summary.
//!
//! Run with `cargo run --release --example simulation_files`.

use qrs::bench::{simulate, ExperimentConfig, SUMMARY};

fn main() -> qrs::Result<()> {
    let cfg = ExperimentConfig::from_json(
        r#"{"k": 20, "delta": 1, "Delta": 0.1, "M": 500, "trials": 5,
            "noise": {"kind": "periodic_pauli", "period": 20, "op": "Y"}}"#,
    )?;
    let dir = std::env::temp_dir().join(format!("qrs-simulation-{}", std::process::id()));
    let runs = simulate(&cfg, 7, &dir)?;
    print!("{}", std::fs::read_to_string(dir.join(SUMMARY))?);
    let aborted: u64 = runs.iter().map(|r| r.aborted).sum();
    println!("aborted rounds: {aborted} (the schedule is matched to Delta)");
    println!("files in {}", dir.display());
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

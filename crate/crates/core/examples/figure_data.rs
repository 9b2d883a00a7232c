//! Emitting figure data from the library instead of the CLI: the default
//! asymmetry curve against qubit count, and a custom sweep.
//!
//! Run with `cargo run --example figure_data`.

use qrs::bench::{emit_figure, ExperimentConfig, Sweep, SweepVariable};

fn main() -> qrs::Result<()> {
    let cfg = ExperimentConfig::default();
    let curve = emit_figure(6, &cfg)?;
    print!("{}", curve.to_csv().lines().take(6).map(|l| format!("{l}\n")).collect::<String>());
    println!("... {} rows in {} series", curve.points.len(), curve.labels().len());

    let sweep = ExperimentConfig {
        sweep: Some(Sweep { variable: SweepVariable::M, values: vec![1.0, 10.0, 100.0, 1000.0] }),
        ..cfg
    };
    let curve = emit_figure(5, &sweep)?;
    curve.write_csv(std::io::stdout().lock())?;
    for w in &curve.warnings {
        eprintln!("warning: {w}");
    }
    Ok(())
}

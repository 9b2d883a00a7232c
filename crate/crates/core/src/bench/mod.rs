//! Harness behind the `qrs` binary.
//!
//! - [`emit_figure`] evaluates the closed-form bounds on a grid and returns
//!   CSV rows `x,series,y` sorted by `(series, x)`.
//! - [`simulate`] runs the full protocol and writes JSON-lines transcripts
//!   plus a per-run summary.
//! - [`verify_theorems`] runs the Monte-Carlo suites in [`suites`] and
//!   reports each check with its statistical margin.
//!
//! Everything is driven by an [`ExperimentConfig`] and a seed. Output bytes
//! depend only on the two: parallel work always draws from streams derived
//! by index and results are assembled in index order.

mod config;
mod curves;
mod simulate;
pub mod suites;
mod table;
mod theorems;

pub use config::{
    one_two_five, Command, ExperimentConfig, Fig3Series, FigureConfig, Sweep, SweepVariable, VerifyConfig,
};
pub use curves::{
    emit_asymmetry, emit_fig3, emit_fig5, emit_figure, AsymmetryAxis, AsymmetrySpec, FIGURES, SMALL_PHASE,
};
pub use simulate::{simulate, RunSummary, SERVER_TRANSCRIPTS, SUMMARY, SUMMARY_HEADER, TRANSCRIPTS};
pub use table::{fmt_real, Cell, Curve, CurvePoint};
pub use theorems::{estimate_runtime, verify_theorems, TheoremReport};

/// Caps the global rayon pool at `QRS_THREADS` when the variable is set.
/// Has no effect once the pool exists.
pub fn init_thread_pool() -> crate::Result<()> {
    let Ok(raw) = std::env::var("QRS_THREADS") else { return Ok(()) };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| crate::Error::Configuration(format!("QRS_THREADS must be a positive integer, got `{raw}`")))?;
    // A second initialization fails harmlessly; the first pool wins.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

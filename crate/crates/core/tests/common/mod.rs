#![allow(dead_code)]

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use qrs::bench::{Curve, CurvePoint};

pub fn qrs_bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_qrs"))
}

/// Runs the binary with an optional thread cap.
pub fn run_qrs(args: &[&str], threads: Option<usize>) -> Output {
    let mut cmd = Command::new(qrs_bin());
    cmd.args(args);
    match threads {
        Some(n) => cmd.env("QRS_THREADS", n.to_string()),
        None => cmd.env_remove("QRS_THREADS"),
    };
    cmd.output().expect("spawn qrs")
}

pub fn write_config(dir: &Path, name: &str, json: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, json).expect("write config");
    p
}

/// Smallest `k` with `√(75 ln(2/δ) / (8k)) + 3Δ ≤ ε`, by direct search.
pub fn required_k_by_search(epsilon: f64, delta: f64, tolerance: f64) -> u64 {
    let c = 75.0 * (2.0 / delta).ln() / 8.0;
    let mut k = 1u64;
    while (c / k as f64).sqrt() + 3.0 * tolerance > epsilon {
        k += 1;
    }
    k
}

/// Y values of one series, in x order.
pub fn ys(curve: &Curve, label: &str) -> Vec<f64> {
    curve.series(label).iter().map(|p: &&CurvePoint| p.y.as_f64().expect("numeric row")).collect()
}

pub fn strictly_increasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] > w[0])
}

pub fn strictly_decreasing(v: &[f64]) -> bool {
    v.windows(2).all(|w| w[1] < w[0])
}

/// Outcome of one numbered criterion.
pub struct Verdict {
    pub passed: bool,
    pub detail: String,
}

impl Verdict {
    pub fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self { passed, detail: detail.into() }
    }
}

/// Runs `f`, turning a panic into a failure, and prints one status line
/// straight to stderr so it shows even when test output is captured.
pub fn criterion(n: u32, title: &str, f: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Verdict::new(false, format!("panicked: {msg}"))
    });
    let line = format!(
        "criterion {n:>2} [{}] {title} ({:.1} s): {}\n",
        if v.passed { "PASS" } else { "FAIL" },
        start.elapsed().as_secs_f64(),
        v.detail
    );
    let mut err = std::io::stderr().lock();
    let _ = err.write_all(line.as_bytes());
    let _ = err.flush();
    v.passed
}

use serde::Serialize;

use super::config::{ExperimentConfig, VerifyConfig};
use super::suites::{client_dominance, completeness, server_dominance, soundness, SuiteResult};
use crate::error::{Error, Result};
use crate::rng::SeedStream;

/// Seconds per simulated register through the sampling test, measured on
/// one core with an optimized build and rounded up.
const SECONDS_PER_REGISTER: f64 = 3e-7;
/// Seconds per single-qubit readout sample.
const SECONDS_PER_SAMPLE: f64 = 5e-8;
/// Schedules in the soundness battery.
const BATTERY_SIZE: f64 = 6.0;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TheoremReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteResult>,
}

/// Single-core runtime estimate in seconds.
pub fn estimate_runtime(v: &VerifyConfig) -> f64 {
    let registers = |ks: &[u64], trials: u64| ks.iter().map(|k| 4.0 * *k as f64).sum::<f64>() * trials as f64;
    let test = registers(&v.completeness_k, v.completeness_trials)
        + BATTERY_SIZE * registers(&v.soundness_k, v.soundness_trials);
    let samples = 2.0 * v.rms_epsilons.len() as f64 * v.rms_m.iter().sum::<u64>() as f64 * v.rms_runs as f64;
    test * SECONDS_PER_REGISTER + samples * SECONDS_PER_SAMPLE
}

fn check_feasible(v: &VerifyConfig) -> Result<()> {
    let trials = [v.completeness_trials, v.soundness_trials, v.rms_runs];
    if trials.iter().any(|t| *t < 1_000) {
        return Err(Error::Configuration(format!(
            "every suite needs at least 1000 trials, got {trials:?}"
        )));
    }
    if v.completeness_k.is_empty() || v.soundness_k.is_empty() || v.rms_epsilons.is_empty() || v.rms_m.is_empty() {
        return Err(Error::Configuration("suite grids must be non-empty".into()));
    }
    let est = estimate_runtime(v);
    if est > v.max_runtime_s {
        return Err(Error::Configuration(format!(
            "estimated runtime {est:.0} s exceeds the budget of {:.0} s; lower k or trials, or raise max_runtime_s",
            v.max_runtime_s
        )));
    }
    Ok(())
}

/// Runs completeness, soundness and the client/server dominance suites.
/// The report passes only if every check does.
pub fn verify_theorems(cfg: &ExperimentConfig, seed: u64) -> Result<TheoremReport> {
    let v = &cfg.verify;
    check_feasible(v)?;
    let root = SeedStream::new(seed);
    let suites = vec![
        completeness(&v.completeness_k, 0.0, v.completeness_trials, root.named("completeness"))?,
        soundness(
            &v.soundness_k,
            v.soundness_delta,
            v.soundness_tolerance,
            v.soundness_trials,
            root.named("soundness"),
        )?,
        client_dominance(&v.rms_epsilons, &v.rms_m, v.rms_runs, &cfg.field, root.named("client"))?,
        server_dominance(&v.rms_epsilons, &v.rms_m, v.rms_runs, &cfg.field, root.named("server"))?,
    ];
    Ok(TheoremReport { seed, passed: suites.iter().all(|s| s.passed), suites })
}

//! The random-sampling test that certifies one Bell pair out of `4k`.
//!
//! The server hands over `4k` two-qubit registers. The client picks `k` of
//! them for a `σ_x ⊗ σ_x` test, `k` of the rest for a `σ_z ⊗ σ_z` test, and
//! one of the remaining `2k` as the target. The round is accepted when the
//! number of failed tests is at most `2kΔ`, in which case the target's
//! fidelity with `|Φ⁺⟩` is at least `1 − ε + 3Δ − 3 N_fail / (2k)` except
//! with probability `δ`.
//!
//! [`TestEngine`] holds the bookkeeping. [`run_sampling_test`] drives it in
//! batch order; the protocol module drives the same engine step by step.

mod analytics;
mod engine;

pub use analytics::{joint_confidence, joint_confidence_relaxed, serfling_tail, soundness_floor};
pub use engine::{
    partition_registers, run_sampling_test, FixedSource, NoisyBellSource, Omniscient, RegisterPartition,
    RegisterSource, Role, TestEngine, TestVerdict,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling-test configuration. `tolerance` is the tolerated failure
/// fraction `Δ` (serialized as `"Delta"`); `k` is the per-test sample size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TestParams {
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub tolerance: f64,
    pub k: u64,
}

impl TestParams {
    /// Parameters with the smallest `k` that certifies `(ε, δ, Δ)`.
    pub fn new(epsilon: f64, delta: f64, tolerance: f64) -> Result<Self> {
        let k = required_k(epsilon, delta, tolerance)?;
        Ok(Self { epsilon, delta, tolerance, k })
    }

    /// Parameters for a fixed resource budget `k`, with `ε` recovered as
    /// `3Δ + √(75 ln(2/δ) / (8k))`.
    pub fn from_resources(k: u64, delta: f64, tolerance: f64) -> Result<Self> {
        if k == 0 {
            return Err(Error::Parameter("k must be positive".into()));
        }
        check_delta(delta)?;
        if !(tolerance >= 0.0) {
            return Err(Error::Parameter(format!("Delta must be non-negative, got {tolerance}")));
        }
        let mut epsilon = epsilon_for(k, delta, tolerance);
        let p = Self { epsilon, delta, tolerance, k };
        p.validate()?;
        // Rounding can leave required_k(ε) one above k; step ε up by ulps so
        // the pair stays consistent for anyone recomputing k from (ε, δ, Δ).
        for _ in 0..64 {
            if required_k(epsilon, delta, tolerance)? <= k {
                break;
            }
            epsilon = epsilon.next_up();
        }
        if required_k(epsilon, delta, tolerance)? != k {
            return Err(Error::Parameter(format!("cannot recover epsilon for k = {k}")));
        }
        Ok(Self { epsilon, ..p })
    }

    pub fn validate(&self) -> Result<()> {
        check_triple(self.epsilon, self.delta, self.tolerance)?;
        if self.k == 0 {
            return Err(Error::Parameter("k must be positive".into()));
        }
        Ok(())
    }

    /// Total number of registers, `4k`.
    pub fn registers(&self) -> u64 {
        4 * self.k
    }

    /// Total number of qubits, `8k`.
    pub fn qubits(&self) -> u64 {
        8 * self.k
    }

    /// The acceptance threshold `2kΔ` as a real.
    pub fn fail_threshold(&self) -> f64 {
        2.0 * self.k as f64 * self.tolerance
    }

    /// `N_fail ≤ 2kΔ`, compared exactly against the real threshold.
    pub fn accepts(&self, n_fail: u64) -> bool {
        n_fail as f64 <= self.fail_threshold()
    }
}

pub(crate) fn epsilon_for(k: u64, delta: f64, tolerance: f64) -> f64 {
    3.0 * tolerance + (75.0 * (2.0 / delta).ln() / (8.0 * k as f64)).sqrt()
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::Parameter(format!("delta must lie in (0, 1], got {delta}")));
    }
    Ok(())
}

fn check_triple(epsilon: f64, delta: f64, tolerance: f64) -> Result<()> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::Parameter(format!("epsilon must lie in (0, 1], got {epsilon}")));
    }
    check_delta(delta)?;
    if !(tolerance >= 0.0) {
        return Err(Error::Parameter(format!("Delta must be non-negative, got {tolerance}")));
    }
    if tolerance >= epsilon / 3.0 {
        return Err(Error::Parameter(format!("Delta = {tolerance} must be below epsilon/3 = {}", epsilon / 3.0)));
    }
    Ok(())
}

/// `k = ⌈75 ln(2/δ) / (8 (ε − 3Δ)²)⌉`.
pub fn required_k(epsilon: f64, delta: f64, tolerance: f64) -> Result<u64> {
    check_triple(epsilon, delta, tolerance)?;
    let gap = epsilon - 3.0 * tolerance;
    let k = (75.0 * (2.0 / delta).ln() / (8.0 * gap * gap)).ceil();
    if !k.is_finite() || k > u64::MAX as f64 {
        return Err(Error::Parameter("required k overflows".into()));
    }
    Ok((k as u64).max(1))
}

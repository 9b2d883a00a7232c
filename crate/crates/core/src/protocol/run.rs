use std::io::Write;

use rand::RngCore;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::round::{run_round_with, RoundOptions, RoundRecord};
use crate::error::{Error, Result};
use crate::noise::NoiseSchedule;
use crate::qcore::{bloch_from_density, partial_trace, BlochVector, DensityMatrix, Outcome, SensingField, Subsystem};
use crate::rng::SeedStream;
use crate::verify::TestParams;

/// What the client does after a failed test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(tag = "policy", rename_all = "snake_case")]
pub enum AbortPolicy {
    /// Drop the repetition and move on.
    #[default]
    Skip,
    /// Rerun the repetition with fresh registers, at most `max_retries` times.
    Retry { max_retries: u32 },
    /// Stop the whole run at the first failed test.
    Halt,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub policy: AbortPolicy,
    pub record_transcript: bool,
}

/// `M` repetitions and their aggregate.
#[derive(Clone, Debug, Serialize)]
pub struct RunRecord {
    pub rounds: Vec<RoundRecord>,
    /// Mean of `s ⊕ o` over accepted rounds.
    #[serde(rename = "S_M")]
    pub s_m: f64,
    pub omega_true: f64,
    pub t: f64,
    /// Requested repetition count.
    #[serde(rename = "M")]
    pub m: u64,
    pub accepted: u64,
    pub aborted: u64,
}

/// The server's projection of a run.
#[derive(Clone, Debug, Serialize)]
pub struct ServerRunView {
    pub o_bits: Vec<Outcome>,
    pub t: f64,
}

impl ServerRunView {
    /// Mean of the server's readouts.
    pub fn frequency(&self) -> Result<f64> {
        if self.o_bits.is_empty() {
            return Err(Error::EstimationImpossible("no readouts".into()));
        }
        Ok(self.o_bits.iter().filter(|o| o.is_one()).count() as f64 / self.o_bits.len() as f64)
    }
}

impl RunRecord {
    pub fn server_view(&self) -> ServerRunView {
        ServerRunView { o_bits: self.rounds.iter().filter_map(|r| r.o).collect(), t: self.t }
    }

    /// Bloch vector of the server's half of the target, averaged over
    /// accepted rounds: the state an omniscient server would assume.
    pub fn omniscient_server_state(&self) -> Result<BlochVector> {
        let mut sum = [0.0; 3];
        let mut n = 0usize;
        for r in self.rounds.iter().filter(|r| !r.aborted) {
            let Some(o) = r.verdict.omniscient() else { continue };
            let b = bloch_from_density(&partial_trace(&o.target_state, Subsystem::Second)?)?;
            sum[0] += b.r_x;
            sum[1] += b.r_y;
            sum[2] += b.r_z;
            n += 1;
        }
        if n == 0 {
            return Err(Error::EstimationImpossible("no accepted rounds".into()));
        }
        let n = n as f64;
        Ok(BlochVector { r_x: sum[0] / n, r_y: sum[1] / n, r_z: sum[2] / n })
    }

    /// One JSON object per round. With `server_view` set, each line is the
    /// server's projection and carries neither `s` nor `s ⊕ o`.
    pub fn write_jsonl<W: Write>(&self, mut out: W, server_view: bool) -> Result<()> {
        for r in &self.rounds {
            if server_view {
                serde_json::to_writer(&mut out, &r.server_view())?;
            } else {
                serde_json::to_writer(&mut out, r)?;
            }
            out.write_all(b"\n")?;
        }
        Ok(())
    }
}

/// Runs `M` independent repetitions with the default skip policy.
pub fn run_protocol(
    m: u64,
    params: &TestParams,
    sched: &NoiseSchedule,
    field: &SensingField,
    rng: &mut dyn RngCore,
) -> Result<RunRecord> {
    run_protocol_with(m, params, sched, field, rng, RunOptions::default())
}

/// Repetition `i`, attempt `j` draws from `base.child(i).child(j)` where
/// `base` is seeded from `rng`, so the result does not depend on how the
/// rounds are scheduled across threads.
pub fn run_protocol_with(
    m: u64,
    params: &TestParams,
    sched: &NoiseSchedule,
    field: &SensingField,
    rng: &mut dyn RngCore,
    options: RunOptions,
) -> Result<RunRecord> {
    if m == 0 {
        return Err(Error::InvalidArgument("M must be at least 1".into()));
    }
    params.validate()?;
    sched.validate()?;
    field.validate()?;
    let base = SeedStream::from_rng(rng);
    let round_opts = RoundOptions { record_transcript: options.record_transcript };
    let max_attempts = match options.policy {
        AbortPolicy::Retry { max_retries } => max_retries.saturating_add(1),
        _ => 1,
    };

    let slots: Vec<Vec<RoundRecord>> = (0..m)
        .into_par_iter()
        .map(|i| {
            let stream = base.child(i);
            let mut attempts = Vec::new();
            for j in 0..max_attempts {
                let mut r = stream.child(u64::from(j)).rng();
                let mut rec = run_round_with(params, sched, field, &mut r, round_opts)?;
                rec.round = i;
                rec.attempt = j;
                let done = !rec.aborted;
                attempts.push(rec);
                if done {
                    break;
                }
            }
            Ok(attempts)
        })
        .collect::<Result<_>>()?;

    let mut rounds: Vec<RoundRecord> = slots.into_iter().flatten().collect();
    if options.policy == AbortPolicy::Halt {
        if let Some(first) = rounds.iter().position(|r| r.aborted) {
            rounds.truncate(first + 1);
        }
    }
    let accepted = rounds.iter().filter(|r| !r.aborted).count() as u64;
    let aborted = rounds.len() as u64 - accepted;
    if accepted == 0 {
        return Err(Error::EstimationImpossible(format!("all {} attempted rounds aborted", rounds.len())));
    }
    let ones = rounds.iter().filter(|r| r.sensing_bit.is_some_and(Outcome::is_one)).count();
    Ok(RunRecord {
        s_m: ones as f64 / accepted as f64,
        rounds,
        omega_true: field.omega,
        t: field.t,
        m,
        accepted,
        aborted,
    })
}

/// `(2 S_M − 1) / t`.
pub fn client_estimate(run: &RunRecord) -> Result<f64> {
    if run.accepted == 0 {
        return Err(Error::EstimationImpossible("no accepted rounds".into()));
    }
    Ok((2.0 * run.s_m - 1.0) / run.t)
}

/// Below this `|R_x|` the readout carries no usable phase information.
pub const MIN_SLOPE: f64 = 1e-9;

/// `(2 S_srv − 1 − R_y) / (R_x t)` for a server that assumes its half of
/// the target is in `assumed_state`.
pub fn server_estimate(view: &ServerRunView, assumed_state: BlochVector) -> Result<f64> {
    if assumed_state.r_x.abs() < MIN_SLOPE {
        return Err(Error::Unestimable(format!(
            "assumed state has R_x = {:.3e}; readouts do not depend on omega",
            assumed_state.r_x
        )));
    }
    let freq = view.frequency()?;
    Ok((2.0 * freq - 1.0 - assumed_state.r_y) / (assumed_state.r_x * view.t))
}

/// The server's honest prior: without `s` its half of an ideal pair is `I/2`.
pub fn marginal_server_estimate(view: &ServerRunView) -> Result<f64> {
    server_estimate(view, BlochVector::ORIGIN)
}

/// The Ramsey estimator `(2 S − 1 − r_y) / (r_x t)` applied to raw bits.
pub fn estimate_from_bits(ones: u64, total: u64, r_x: f64, r_y: f64, t: f64) -> Result<f64> {
    if total == 0 {
        return Err(Error::EstimationImpossible("no samples".into()));
    }
    if r_x.abs() < MIN_SLOPE {
        return Err(Error::Unestimable("zero slope".into()));
    }
    Ok((2.0 * ones as f64 / total as f64 - 1.0 - r_y) / (r_x * t))
}

/// Target register density matrices of accepted rounds (simulation only).
pub fn accepted_targets(run: &RunRecord) -> Vec<DensityMatrix> {
    run.rounds
        .iter()
        .filter(|r| !r.aborted)
        .filter_map(|r| r.verdict.omniscient().map(|o| o.target_state))
        .collect()
}

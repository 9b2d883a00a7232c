//! Monte-Carlo suites checking the four theorems and the Ramsey baselines
//! at desk scale. Each suite returns a [`SuiteResult`] with one [`Check`]
//! per parameter point; trial `i` of a point always draws from the same
//! derived stream, so results do not depend on the thread count.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{client_floor, client_upper, hoeffding_standard, server_lower, standard_uncertainty, BoundInputs};
use crate::error::{Error, Result};
use crate::noise::{NoiseSchedule, Pauli};
use crate::protocol::{client_estimate, estimate_from_bits, run_protocol};
use crate::qcore::{density_from_bloch, evolve_phase, sample_outcome, Axis, BlochVector, SensingField};
use crate::rng::SeedStream;
use crate::verify::{run_sampling_test, NoisyBellSource, TestParams};

/// One comparison of an observed statistic against an interval.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub label: String,
    pub observed: f64,
    /// Monte-Carlo standard error of `observed`, zero for exact counts.
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub upper: Option<f64>,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Check {
    fn within(label: String, observed: f64, sigma: f64, lower: Option<f64>, upper: Option<f64>) -> Self {
        let passed = observed.is_finite()
            && lower.is_none_or(|l| observed >= l)
            && upper.is_none_or(|u| observed <= u);
        Self { label, observed, sigma, lower, upper, passed, note: String::new() }
    }

    fn with_note(mut self, note: String) -> Self {
        self.note = note;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

impl SuiteResult {
    fn new(name: &str, checks: Vec<Check>) -> Self {
        Self { name: name.to_string(), passed: checks.iter().all(|c| c.passed), checks }
    }

    /// Merges several results under one name.
    pub fn combine(name: &str, parts: Vec<SuiteResult>) -> Self {
        Self::new(name, parts.into_iter().flat_map(|p| p.checks).collect())
    }
}

/// Binomial standard error of a frequency.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Root mean square of `errors` and the standard error of that RMS
/// estimate, from the delta method on the mean of squares.
pub fn rms_with_sigma(errors: &[f64]) -> (f64, f64) {
    let n = errors.len() as f64;
    let sq: Vec<f64> = errors.iter().map(|e| e * e).collect();
    let mse = sq.iter().sum::<f64>() / n;
    let var = sq.iter().map(|s| (s - mse).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let rms = mse.sqrt();
    let sigma = if rms > 0.0 { (var / n).sqrt() / (2.0 * rms) } else { 0.0 };
    (rms, sigma)
}

fn par_trials<T, F>(stream: SeedStream, trials: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut crate::rng::StreamRng) -> Result<T> + Sync,
{
    (0..trials).into_par_iter().map(|i| f(&mut stream.child(i).rng())).collect()
}

/// Ideal `|Φ⁺⟩` registers must always pass. Parameters are built directly
/// so that `k` is free: `ε = δ = 1` and only `Δ` enters the decision.
pub fn completeness(ks: &[u64], tolerance: f64, trials: u64, stream: SeedStream) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    for &k in ks {
        let params = TestParams { epsilon: 1.0, delta: 1.0, tolerance, k };
        params.validate()?;
        let accepted = par_trials(stream.child(k), trials, |rng| {
            let mut src = NoisyBellSource { schedule: NoiseSchedule::Identity };
            Ok(run_sampling_test(params, &mut src, rng)?.accepted)
        })?;
        let rate = accepted.iter().filter(|a| **a).count() as f64 / trials as f64;
        checks.push(Check::within(
            format!("k={k} Delta={tolerance} trials={trials}: acceptance rate"),
            rate,
            0.0,
            Some(1.0),
            Some(1.0),
        ));
    }
    Ok(SuiteResult::new("completeness", checks))
}

/// Noise schedules exercised by the soundness suite, for `4k` registers.
pub fn soundness_battery(k: u64) -> Result<Vec<(String, NoiseSchedule)>> {
    let n = 4 * k;
    let burst_len = (n / 20).max(1);
    let burst_start = n / 3;
    let ops = (0..n)
        .map(|i| if (burst_start..burst_start + burst_len).contains(&i) { Pauli::Y } else { Pauli::I })
        .collect();
    Ok(vec![
        ("iid_x_0.1".into(), NoiseSchedule::iid(0.1, 0.0, 0.0)?),
        ("iid_z_0.1".into(), NoiseSchedule::iid(0.0, 0.0, 0.1)?),
        ("iid_y_0.05".into(), NoiseSchedule::iid(0.0, 0.05, 0.0)?),
        ("iid_mixed".into(), NoiseSchedule::iid(0.03, 0.02, 0.03)?),
        ("periodic_y_20".into(), NoiseSchedule::periodic(20, Pauli::Y)?),
        ("burst_y_5pct".into(), NoiseSchedule::Scripted { ops }),
    ])
}

/// Frequency of {accepted and ensemble fidelity below the certified floor}
/// must stay below `δ` within three binomial standard errors. `ε` is the
/// smallest value certified by `k` registers per test.
pub fn soundness(ks: &[u64], delta: f64, tolerance: f64, trials: u64, stream: SeedStream) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    for &k in ks {
        let params = TestParams::from_resources(k, delta, tolerance)?;
        for (name, schedule) in soundness_battery(k)? {
            let outcomes = par_trials(stream.child(k).named(&name), trials, |rng| {
                let mut src = NoisyBellSource { schedule: schedule.clone() };
                let v = run_sampling_test(params, &mut src, rng)?;
                let f = v.omniscient().expect("simulated verdict").ensemble_fidelity();
                Ok((v.accepted, v.accepted && f < v.fidelity_floor))
            })?;
            let accepted = outcomes.iter().filter(|o| o.0).count();
            let violations = outcomes.iter().filter(|o| o.1).count();
            let freq = violations as f64 / trials as f64;
            let sigma = binomial_sigma(delta, trials);
            checks.push(
                Check::within(
                    format!("{name} k={k} eps={:.4}: violation frequency", params.epsilon),
                    freq,
                    sigma,
                    None,
                    Some(delta + 3.0 * sigma),
                )
                .with_note(format!("acceptance rate {:.4}", accepted as f64 / trials as f64)),
            );
        }
    }
    Ok(SuiteResult::new("soundness", checks))
}

/// Smallest sampling test with `δ = 1`, enough to drive the protocol when
/// certification strength is not under study.
pub fn minimal_params() -> Result<TestParams> {
    TestParams::from_resources(7, 1.0, 0.0)
}

/// Client estimation errors `ω̂ − ω` over `runs` ideal protocol runs.
pub fn protocol_errors(
    m: u64,
    runs: u64,
    field: &SensingField,
    noise: &NoiseSchedule,
    stream: SeedStream,
) -> Result<Vec<f64>> {
    let params = minimal_params()?;
    (0..runs)
        .map(|i| {
            let run = run_protocol(m, &params, noise, field, &mut stream.child(i).rng())?;
            Ok(client_estimate(&run)? - field.omega)
        })
        .collect()
}

/// RMS error of the ideal protocol within `rel` of `1/(t√M)`.
pub fn ramsey_rms(field: &SensingField, m: u64, runs: u64, rel: f64, stream: SeedStream) -> Result<SuiteResult> {
    let errors = protocol_errors(m, runs, field, &NoiseSchedule::Identity, stream)?;
    let (rms, sigma) = rms_with_sigma(&errors);
    let target = standard_uncertainty(m, field.t)?;
    let check = Check::within(
        format!("M={m} runs={runs}: RMS error vs 1/(t sqrt M) = {target:.4e}"),
        rms,
        sigma,
        Some(target * (1.0 - rel)),
        Some(target * (1.0 + rel)),
    );
    Ok(SuiteResult::new("ramsey_baseline", vec![check]))
}

/// Readout errors of a single-qubit probe in `state`, decoded with the
/// Ramsey estimator for an assumed Bloch vector `(r_x, r_y)`.
fn probe_errors(
    state: BlochVector,
    assumed: (f64, f64),
    field: &SensingField,
    m: u64,
    runs: u64,
    stream: SeedStream,
) -> Result<Vec<f64>> {
    let evolved = evolve_phase(&density_from_bloch(state)?, field)?;
    par_trials(stream, runs, |rng| {
        let mut ones = 0u64;
        for _ in 0..m {
            if sample_outcome(&evolved, Axis::Y, rng)?.0.is_one() {
                ones += 1;
            }
        }
        Ok(estimate_from_bits(ones, m, assumed.0, assumed.1, field.t)? - field.omega)
    })
}

/// `ε − ε²`.
fn leak(eps: f64) -> f64 {
    eps - eps * eps
}

/// The client's worst admissible state, `r = (1 − 2ε, 2√(ε − ε²), 0)`,
/// decoded as if it were `|+⟩`: RMS error at most the client bound.
/// At the largest `ε` and `M`, when `M` is deep in the flat regime, the RMS
/// must also sit within 10% of the `M → ∞` floor.
pub fn client_dominance(
    epsilons: &[f64],
    ms: &[u64],
    runs: u64,
    field: &SensingField,
    stream: SeedStream,
) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    for &eps in epsilons {
        let state = BlochVector::new(1.0 - 2.0 * eps, 2.0 * leak(eps).sqrt(), 0.0)?;
        for &m in ms {
            let errors = probe_errors(state, (1.0, 0.0), field, m, runs, stream.child(m).named(&eps.to_string()))?;
            let (rms, sigma) = rms_with_sigma(&errors);
            let bound = client_upper(&BoundInputs::new(eps, m, field.t))?;
            checks.push(Check::within(
                format!("eps={eps} M={m}: client RMS <= upper bound"),
                rms,
                sigma,
                None,
                Some(bound + 3.0 * sigma),
            ));
            let eps_max = epsilons.iter().copied().fold(f64::MIN, f64::max);
            let m_max = *ms.iter().max().expect("non-empty grid");
            if eps == eps_max && m == m_max && eps > 0.0 && (m as f64) >= 100.0 / (4.0 * leak(eps)) {
                let floor = client_floor(eps, field.t)?;
                checks.push(Check::within(
                    format!("eps={eps} M={m}: client RMS within 10% of floor {floor:.4}"),
                    rms,
                    sigma,
                    Some(0.9 * floor),
                    Some(1.1 * floor),
                ));
            }
        }
    }
    Ok(SuiteResult::new("client_dominance", checks))
}

/// A server holding the best state the test lets leak, `R = (2√(ε − ε²),
/// 0, 0)`, and knowing it exactly: RMS error at least the server bound.
pub fn server_dominance(
    epsilons: &[f64],
    ms: &[u64],
    runs: u64,
    field: &SensingField,
    stream: SeedStream,
) -> Result<SuiteResult> {
    let mut checks = Vec::new();
    for &eps in epsilons {
        if eps <= 0.0 {
            return Err(Error::Configuration("server dominance needs epsilon > 0".into()));
        }
        let r_x = 2.0 * leak(eps).sqrt();
        let state = BlochVector::new(r_x, 0.0, 0.0)?;
        for &m in ms {
            let errors = probe_errors(state, (r_x, 0.0), field, m, runs, stream.child(m).named(&eps.to_string()))?;
            let (rms, sigma) = rms_with_sigma(&errors);
            let bound = server_lower(&BoundInputs::new(eps, m, field.t))?.unwrap();
            checks.push(Check::within(
                format!("eps={eps} M={m}: server RMS >= lower bound"),
                rms,
                sigma,
                Some(bound - 3.0 * sigma),
                None,
            ));
        }
    }
    Ok(SuiteResult::new("server_dominance", checks))
}

/// The server's readouts from ideal pairs at two field strengths, compared
/// with a two-sample z-test on the frequency of `o = 1`.
pub fn marginal_independence(
    omegas: (f64, f64),
    t: f64,
    rounds: u64,
    z_max: f64,
    stream: SeedStream,
) -> Result<SuiteResult> {
    let params = minimal_params()?;
    let mut freq = [0.0; 2];
    for (i, omega) in [omegas.0, omegas.1].into_iter().enumerate() {
        let field = SensingField::new(omega, t)?;
        let run = run_protocol(rounds, &params, &NoiseSchedule::Identity, &field, &mut stream.child(i as u64).rng())?;
        freq[i] = run.server_view().frequency()?;
    }
    let pooled = (freq[0] + freq[1]) / 2.0;
    let se = (pooled * (1.0 - pooled) * 2.0 / rounds as f64).sqrt();
    let z = if se > 0.0 { (freq[0] - freq[1]) / se } else { 0.0 };
    let check = Check::within(
        format!("omega={} vs omega={} over {rounds} rounds: z statistic", omegas.0, omegas.1),
        z,
        1.0,
        Some(-z_max),
        Some(z_max),
    )
    .with_note(format!("P(o=1) = {:.5} vs {:.5}", freq[0], freq[1]));
    Ok(SuiteResult::new("marginal_independence", vec![check]))
}

/// Frequency of `|ω̂ − ω| > 2s̃/(t√M)` over ideal protocol runs, at most
/// `2e^{−2s̃²}` within three binomial standard errors.
pub fn hoeffding_coverage(
    s_tildes: &[f64],
    m: u64,
    runs: u64,
    field: &SensingField,
    stream: SeedStream,
) -> Result<SuiteResult> {
    let errors = protocol_errors(m, runs, field, &NoiseSchedule::Identity, stream)?;
    let mut checks = Vec::new();
    for &s in s_tildes {
        let bound = hoeffding_standard(m, field.t, s)?;
        let p = 2.0 * (-2.0 * s * s).exp();
        let misses = errors.iter().filter(|e| e.abs() > bound).count();
        let freq = misses as f64 / runs as f64;
        let sigma = binomial_sigma(p.min(1.0), runs);
        checks.push(Check::within(
            format!("s_tilde={s} M={m} runs={runs}: miss frequency"),
            freq,
            sigma,
            None,
            Some(p + 3.0 * sigma),
        ));
    }
    Ok(SuiteResult::new("hoeffding_coverage", checks))
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseSchedule;
use crate::protocol::AbortPolicy;
use crate::qcore::SensingField;
use crate::verify::TestParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Curves,
    Simulate,
    Verify,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SweepVariable {
    #[serde(rename = "epsilon")]
    Epsilon,
    #[serde(rename = "M")]
    M,
    #[serde(rename = "N")]
    N,
    #[serde(rename = "s_tilde")]
    STilde,
}

/// Replaces the default grid of a figure axis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

impl Sweep {
    pub fn validate(&self) -> Result<()> {
        check_increasing("sweep.values", &self.values)?;
        if matches!(self.variable, SweepVariable::M | SweepVariable::N) {
            for v in &self.values {
                if *v < 1.0 || v.fract() != 0.0 || *v > u64::MAX as f64 {
                    return Err(Error::Configuration(format!("sweep over integers got {v}")));
                }
            }
        }
        if self.variable == SweepVariable::N && self.values.iter().any(|v| !(*v as u64).is_multiple_of(8)) {
            return Err(Error::Configuration("N counts qubits and must be a multiple of 8".into()));
        }
        Ok(())
    }
}

/// One line of the sample-size figure. Exactly one of `Delta` (absolute)
/// and `Delta_per_epsilon` (a fraction of `ε`) must be set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fig3Series {
    pub delta: f64,
    #[serde(rename = "Delta", default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    #[serde(rename = "Delta_per_epsilon", default, skip_serializing_if = "Option::is_none")]
    pub tolerance_per_epsilon: Option<f64>,
}

impl Fig3Series {
    pub fn absolute(delta: f64, tolerance: f64) -> Self {
        Self { delta, tolerance: Some(tolerance), tolerance_per_epsilon: None }
    }

    pub fn relative(delta: f64, fraction: f64) -> Self {
        Self { delta, tolerance: None, tolerance_per_epsilon: Some(fraction) }
    }

    pub fn tolerance_at(&self, epsilon: f64) -> Result<f64> {
        match (self.tolerance, self.tolerance_per_epsilon) {
            (Some(d), None) => Ok(d),
            (None, Some(f)) => Ok(f * epsilon),
            _ => Err(Error::Configuration("set exactly one of Delta and Delta_per_epsilon".into())),
        }
    }

    pub fn label(&self) -> String {
        match (self.tolerance, self.tolerance_per_epsilon) {
            (_, Some(f)) => format!("delta={}|Delta={}*eps", self.delta, f),
            (Some(d), _) => format!("delta={}|Delta={}", self.delta, d),
            _ => format!("delta={}", self.delta),
        }
    }
}

/// Grids and series of the analytic figures.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FigureConfig {
    pub fig3_series: Vec<Fig3Series>,
    pub epsilon_grid: Vec<f64>,
    /// `ε` values of the client-bound figure.
    pub fig5_epsilons: Vec<f64>,
    #[serde(rename = "M_grid")]
    pub m_grid: Vec<u64>,
    /// Qubit counts `N = 8k`.
    #[serde(rename = "N_grid")]
    pub n_grid: Vec<u64>,
    #[serde(rename = "M_series")]
    pub m_series: Vec<u64>,
    #[serde(rename = "N_series")]
    pub n_series: Vec<u64>,
    /// Failure probability used to turn `N` into `ε`.
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub tolerance: f64,
}

/// `1, 2, 5, 10, 20, 50, ...` from `lo` up to and including `hi`.
pub fn one_two_five(lo: u64, hi: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut decade = 1u64;
    while decade <= hi {
        for m in [1, 2, 5] {
            let v = decade * m;
            if (lo..=hi).contains(&v) {
                out.push(v);
            }
        }
        decade = match decade.checked_mul(10) {
            Some(d) => d,
            None => break,
        };
    }
    out
}

impl Default for FigureConfig {
    fn default() -> Self {
        Self {
            fig3_series: vec![
                Fig3Series::absolute(1e-3, 0.0),
                Fig3Series::absolute(1e-5, 0.0),
                Fig3Series::relative(1e-3, 0.1),
            ],
            epsilon_grid: (1..=50).map(|i| i as f64 / 100.0).collect(),
            fig5_epsilons: vec![0.0, 0.001, 0.01, 0.1],
            m_grid: one_two_five(1, 100_000),
            n_grid: one_two_five(1_000, 1_000_000_000).into_iter().map(|k| 8 * k).collect(),
            m_series: vec![10, 100, 1_000, 10_000],
            n_series: vec![8_000_000, 80_000_000, 800_000_000, 8_000_000_000],
            delta: 1e-6,
            tolerance: 0.0,
        }
    }
}

impl FigureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.fig3_series.is_empty() {
            return Err(Error::Configuration("fig3_series is empty".into()));
        }
        for s in &self.fig3_series {
            s.tolerance_at(0.0)?;
        }
        check_increasing("epsilon_grid", &self.epsilon_grid)?;
        check_increasing("fig5_epsilons", &self.fig5_epsilons)?;
        for (name, g) in [
            ("M_grid", &self.m_grid),
            ("N_grid", &self.n_grid),
            ("M_series", &self.m_series),
            ("N_series", &self.n_series),
        ] {
            let as_f: Vec<f64> = g.iter().map(|v| *v as f64).collect();
            check_increasing(name, &as_f)?;
            if g.contains(&0) {
                return Err(Error::Configuration(format!("{name} must be positive")));
            }
        }
        if self.n_grid.iter().chain(&self.n_series).any(|n| n % 8 != 0) {
            return Err(Error::Configuration("N counts qubits and must be a multiple of 8".into()));
        }
        Ok(())
    }
}

/// Sizes of the Monte-Carlo theorem suites.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub completeness_k: Vec<u64>,
    pub completeness_trials: u64,
    pub soundness_k: Vec<u64>,
    pub soundness_trials: u64,
    pub soundness_delta: f64,
    #[serde(rename = "soundness_Delta")]
    pub soundness_tolerance: f64,
    pub rms_epsilons: Vec<f64>,
    #[serde(rename = "rms_M")]
    pub rms_m: Vec<u64>,
    pub rms_runs: u64,
    /// Refuse when the estimated runtime exceeds this many seconds.
    pub max_runtime_s: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            completeness_k: vec![10, 50, 200],
            completeness_trials: 1_000,
            soundness_k: vec![200, 1_000],
            soundness_trials: 10_000,
            soundness_delta: 0.05,
            soundness_tolerance: 0.05,
            rms_epsilons: vec![0.01, 0.05, 0.1],
            rms_m: vec![100, 10_000],
            rms_runs: 1_000,
            max_runtime_s: 3_600.0,
        }
    }
}

/// One JSON document describing a `qrs` invocation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// When set, must agree with the subcommand.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    pub epsilon: f64,
    pub delta: f64,
    #[serde(rename = "Delta")]
    pub tolerance: f64,
    /// Fixes the sample size; `ε` is then recovered from `(k, δ, Δ)`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    pub field: SensingField,
    #[serde(rename = "M")]
    pub m: u64,
    pub trials: u64,
    pub noise: NoiseSchedule,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_path: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
    pub s_tilde: f64,
    pub abort_policy: AbortPolicy,
    pub record_transcript: bool,
    pub figures: FigureConfig,
    pub verify: VerifyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            command: None,
            epsilon: 0.1,
            delta: 1e-3,
            tolerance: 0.0,
            k: None,
            field: SensingField { omega: 0.05, t: 1.0, t_p: 0.0, t_r: 0.0, total_time: None },
            m: 1_000,
            trials: 10,
            noise: NoiseSchedule::Identity,
            seed: 0,
            output_path: None,
            sweep: None,
            s_tilde: 2.0,
            abort_policy: AbortPolicy::Skip,
            record_transcript: false,
            figures: FigureConfig::default(),
            verify: VerifyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies `key=value` overrides, where `value` is JSON (bare words are
    /// taken as strings), then validates.
    pub fn with_overrides<S: AsRef<str>>(self, overrides: &[S]) -> Result<Self> {
        if overrides.is_empty() {
            return Ok(self);
        }
        let mut doc = serde_json::to_value(&self)?;
        let obj = doc.as_object_mut().expect("config serializes to an object");
        for o in overrides {
            let (key, raw) = o
                .as_ref()
                .split_once('=')
                .ok_or_else(|| Error::Configuration(format!("override `{}` is not key=value", o.as_ref())))?;
            let value = serde_json::from_str(raw).unwrap_or_else(|_| serde_json::Value::String(raw.to_string()));
            obj.insert(key.trim().to_string(), value);
        }
        let cfg: Self = serde_json::from_value(doc)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.field.validate()?;
        self.noise.validate()?;
        self.figures.validate()?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        if self.m == 0 || self.trials == 0 {
            return Err(Error::Configuration("M and trials must be positive".into()));
        }
        Ok(())
    }

    /// Sampling-test parameters: from `k` when given, else the smallest `k`
    /// certifying `(ε, δ, Δ)`.
    pub fn test_params(&self) -> Result<TestParams> {
        match self.k {
            Some(k) => TestParams::from_resources(k, self.delta, self.tolerance),
            None => TestParams::new(self.epsilon, self.delta, self.tolerance),
        }
    }

    /// Rejects a config whose `command` disagrees with the subcommand.
    pub fn check_command(&self, actual: Command) -> Result<()> {
        match self.command {
            Some(c) if c != actual => {
                Err(Error::Configuration(format!("config is for `{c:?}`, invoked as `{actual:?}`")))
            }
            _ => Ok(()),
        }
    }
}

fn check_increasing(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(Error::Configuration(format!("{name} is empty")));
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(Error::Configuration(format!("{name} contains a non-finite value")));
    }
    if v.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Configuration(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

//! Analytic figure data. Every row is a direct evaluation of a function in
//! [`crate::bounds`] or [`crate::verify`]; nothing here is sampled.

use super::config::{ExperimentConfig, Fig3Series, SweepVariable};
use super::table::{Cell, Curve};
use crate::bounds::{
    asymmetry_ratio, client_upper, epsilon_from_resources, hoeffding_ratio, Bound, BoundInputs,
};
use crate::error::{Error, Result};
use crate::verify::required_k;

/// Figures with an emitter.
pub const FIGURES: [u8; 6] = [3, 5, 6, 7, 8, 9];

/// Above this `|ωt|` the linearized bounds stop describing the estimator.
pub const SMALL_PHASE: f64 = 0.1;

/// Qubits `N = 8k` needed for each `(δ, Δ)` series over an `ε` grid.
/// Points with `Δ ≥ ε/3` are emitted as `skipped`.
pub fn emit_fig3(series: &[Fig3Series], epsilon_grid: &[f64]) -> Result<Curve> {
    if series.is_empty() || epsilon_grid.is_empty() {
        return Err(Error::Configuration("series and epsilon grid must be non-empty".into()));
    }
    let mut curve = Curve::default();
    for s in series {
        let label = s.label();
        for &eps in epsilon_grid {
            let tol = s.tolerance_at(eps)?;
            if tol >= eps / 3.0 {
                curve.warn(format!("{label}: Delta = {tol} >= epsilon/3 at epsilon = {eps}, point skipped"));
                curve.push(Cell::Real(eps), &label, Cell::Skipped);
                continue;
            }
            let k = required_k(eps, s.delta, tol)?;
            curve.push(Cell::Real(eps), &label, Cell::Int(8 * k));
        }
    }
    curve.sort();
    Ok(curve)
}

/// Client upper bound against `M`, one series per `ε`.
pub fn emit_fig5(epsilons: &[f64], m_grid: &[u64], t: f64) -> Result<Curve> {
    let mut curve = Curve::default();
    for &eps in epsilons {
        let label = format!("eps={eps}");
        for &m in m_grid {
            let y = client_upper(&BoundInputs::new(eps, m, t))?;
            curve.push(Cell::Int(m), &label, Cell::Real(y));
        }
    }
    curve.sort();
    Ok(curve)
}

/// Which resource runs along the x axis of an asymmetry curve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AsymmetryAxis {
    /// x is the qubit count `N`, series are repetition counts `M`.
    Qubits,
    /// x is `M`, series are qubit counts `N`.
    Repetitions,
}

/// Inputs of the asymmetry-ratio curves.
#[derive(Clone, Debug, PartialEq)]
pub struct AsymmetrySpec {
    pub delta: f64,
    pub tolerance: f64,
    pub t: f64,
    pub axis: AsymmetryAxis,
    pub grid: Vec<u64>,
    pub series: Vec<u64>,
    /// Empty for the Serfling-based ratio; otherwise one block of series per
    /// `s̃` using the Hoeffding ratio.
    pub s_tilde: Vec<f64>,
}

/// `server_lower / client_upper` with `ε` recovered from `N/8` qubits.
/// `ε ≥ 1/2` yields `inapplicable`, a divergent server bound `unbounded`.
pub fn emit_asymmetry(spec: &AsymmetrySpec) -> Result<Curve> {
    let mut curve = Curve::default();
    let blocks: Vec<Option<f64>> =
        if spec.s_tilde.is_empty() { vec![None] } else { spec.s_tilde.iter().copied().map(Some).collect() };
    let name = match spec.axis {
        AsymmetryAxis::Qubits => "M",
        AsymmetryAxis::Repetitions => "N",
    };
    for s in &blocks {
        for &fixed in &spec.series {
            let label = match s {
                Some(s) if blocks.len() > 1 => format!("s_tilde={s}|{name}={fixed}"),
                _ => format!("{name}={fixed}"),
            };
            for &x in &spec.grid {
                let (n, m) = match spec.axis {
                    AsymmetryAxis::Qubits => (x, fixed),
                    AsymmetryAxis::Repetitions => (fixed, x),
                };
                if n == 0 || !n.is_multiple_of(8) {
                    return Err(Error::Configuration(format!("N = {n} is not a positive multiple of 8")));
                }
                let eps = match epsilon_from_resources(n / 8, spec.tolerance, spec.delta) {
                    Ok(e) => e,
                    Err(Error::Domain(msg)) => {
                        curve.warn(format!("{label}: at x = {x}: {msg}"));
                        curve.push(Cell::Int(x), &label, Cell::Inapplicable);
                        continue;
                    }
                    Err(e) => return Err(e),
                };
                let inputs = BoundInputs::new(eps, m, spec.t);
                let ratio = match s {
                    None => asymmetry_ratio(&inputs)?,
                    Some(s) => hoeffding_ratio(&inputs.with_s_tilde(*s))?,
                };
                let y = match ratio {
                    Bound::Value(v) => Cell::Real(v),
                    Bound::Unbounded => Cell::Unbounded,
                };
                curve.push(Cell::Int(x), &label, y);
            }
        }
    }
    curve.sort();
    Ok(curve)
}

fn sweep_for(cfg: &ExperimentConfig, allowed: &[SweepVariable]) -> Result<Option<(SweepVariable, Vec<f64>)>> {
    match &cfg.sweep {
        None => Ok(None),
        Some(s) if allowed.contains(&s.variable) => {
            s.validate()?;
            Ok(Some((s.variable, s.values.clone())))
        }
        Some(s) => Err(Error::Configuration(format!(
            "sweep over {:?} does not apply to this figure (allowed: {allowed:?})",
            s.variable
        ))),
    }
}

fn as_integers(v: &[f64]) -> Vec<u64> {
    v.iter().map(|x| *x as u64).collect()
}

/// Data for figure `fig` from the config, sweep included.
pub fn emit_figure(fig: u8, cfg: &ExperimentConfig) -> Result<Curve> {
    cfg.figures.validate()?;
    let f = &cfg.figures;
    let t = cfg.field.t;
    let mut curve = match fig {
        3 => {
            let grid = match sweep_for(cfg, &[SweepVariable::Epsilon])? {
                Some((_, v)) => v,
                None => f.epsilon_grid.clone(),
            };
            emit_fig3(&f.fig3_series, &grid)?
        }
        5 => {
            let grid = match sweep_for(cfg, &[SweepVariable::M])? {
                Some((_, v)) => as_integers(&v),
                None => f.m_grid.clone(),
            };
            emit_fig5(&f.fig5_epsilons, &grid, t)?
        }
        6..=9 => {
            let hoeffding = fig >= 8;
            let axis = if fig.is_multiple_of(2) { AsymmetryAxis::Qubits } else { AsymmetryAxis::Repetitions };
            let x_var = match axis {
                AsymmetryAxis::Qubits => SweepVariable::N,
                AsymmetryAxis::Repetitions => SweepVariable::M,
            };
            let allowed: &[SweepVariable] =
                if hoeffding { &[x_var, SweepVariable::STilde] } else { &[x_var] };
            let mut spec = AsymmetrySpec {
                delta: f.delta,
                tolerance: f.tolerance,
                t,
                axis,
                grid: match axis {
                    AsymmetryAxis::Qubits => f.n_grid.clone(),
                    AsymmetryAxis::Repetitions => f.m_grid.clone(),
                },
                series: match axis {
                    AsymmetryAxis::Qubits => f.m_series.clone(),
                    AsymmetryAxis::Repetitions => f.n_series.clone(),
                },
                s_tilde: if hoeffding { vec![cfg.s_tilde] } else { Vec::new() },
            };
            match sweep_for(cfg, allowed)? {
                Some((SweepVariable::STilde, v)) => spec.s_tilde = v,
                Some((_, v)) => spec.grid = as_integers(&v),
                None => {}
            }
            emit_asymmetry(&spec)?
        }
        _ => return Err(Error::Configuration(format!("no emitter for figure {fig}; choose one of {FIGURES:?}"))),
    };
    if cfg.field.phase().abs() > SMALL_PHASE {
        curve.warn(format!(
            "|omega t| = {} exceeds {SMALL_PHASE}; the bounds assume |omega t| << 1",
            cfg.field.phase().abs()
        ));
    }
    Ok(curve)
}

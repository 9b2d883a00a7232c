//! Closed-form estimation-uncertainty bounds.
//!
//! All formulas are linearized in `ωt`, so they describe the regime
//! `|ωt| ≪ 1`. The client bounds hold for `0 ≤ ε < 1/2`; the server bounds
//! diverge at `ε = 0`, which is reported as [`Bound::Unbounded`] rather than
//! as an infinite float.

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::verify::epsilon_for;

/// A bound that may be infinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Bound {
    Value(f64),
    Unbounded,
}

impl Bound {
    pub fn value(self) -> Option<f64> {
        match self {
            Bound::Value(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        self == Bound::Unbounded
    }

    /// The finite value; panics on `Unbounded`.
    pub fn unwrap(self) -> f64 {
        self.value().expect("bound is unbounded")
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Value(v) => write!(f, "{v:.16e}"),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bound::Value(v) => s.serialize_f64(*v),
            Bound::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

/// Inputs shared by the bound formulas. `s_tilde` is only read by the
/// Hoeffding variants, `delta` only by the confidence levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundInputs {
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub m: u64,
    pub t: f64,
    pub s_tilde: Option<f64>,
    pub delta: Option<f64>,
}

impl BoundInputs {
    pub fn new(epsilon: f64, m: u64, t: f64) -> Self {
        Self { epsilon, m, t, s_tilde: None, delta: None }
    }

    pub fn with_s_tilde(mut self, s_tilde: f64) -> Self {
        self.s_tilde = Some(s_tilde);
        self
    }

    pub fn with_delta(mut self, delta: f64) -> Self {
        self.delta = Some(delta);
        self
    }

    fn check(&self) -> Result<()> {
        check_mt(self.m, self.t)?;
        if !(0.0..0.5).contains(&self.epsilon) {
            return Err(Error::Domain(format!("epsilon must lie in [0, 1/2), got {}", self.epsilon)));
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d <= 1.0) {
                return Err(Error::Domain(format!("delta must lie in (0, 1], got {d}")));
            }
        }
        Ok(())
    }

    fn s_tilde(&self) -> Result<f64> {
        let s = self.s_tilde.ok_or_else(|| Error::Domain("s_tilde is required".into()))?;
        check_s_tilde(s)?;
        Ok(s)
    }

    /// `ε − ε²`.
    fn leak(&self) -> f64 {
        self.epsilon - self.epsilon * self.epsilon
    }
}

fn check_mt(m: u64, t: f64) -> Result<()> {
    if m == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    Ok(())
}

/// Smallest admissible `s̃`, where `e^{−2s̃²} = 1/2`.
pub fn min_s_tilde() -> f64 {
    (std::f64::consts::LN_2 / 2.0).sqrt()
}

fn check_s_tilde(s: f64) -> Result<()> {
    if !(s.is_finite() && (-2.0 * s * s).exp() <= 0.5) || s <= 0.0 {
        return Err(Error::Domain(format!("s_tilde must satisfy exp(-2 s^2) <= 1/2, got {s}")));
    }
    Ok(())
}

/// `1 / (t√M)`.
pub fn standard_uncertainty(m: u64, t: f64) -> Result<f64> {
    check_mt(m, t)?;
    // Same operation order as `client_upper` at ε = 0, so the two agree bitwise.
    Ok((1.0 / m as f64).sqrt() / t)
}

/// `(1/t) √(1/M + 4(ε − ε²))`.
pub fn client_upper(inputs: &BoundInputs) -> Result<f64> {
    inputs.check()?;
    Ok((1.0 / inputs.m as f64 + 4.0 * inputs.leak()).sqrt() / inputs.t)
}

/// The `M → ∞` limit of [`client_upper`], `(2/t) √(ε − ε²)`.
pub fn client_floor(epsilon: f64, t: f64) -> Result<f64> {
    let i = BoundInputs::new(epsilon, 1, t);
    i.check()?;
    Ok(2.0 * i.leak().sqrt() / t)
}

/// `(1/(2t)) √((1 − 4(ε − ε²)) / (M (ε − ε²)))`.
pub fn server_lower(inputs: &BoundInputs) -> Result<Bound> {
    inputs.check()?;
    let leak = inputs.leak();
    if leak == 0.0 {
        return Ok(Bound::Unbounded);
    }
    let num = (1.0 - 4.0 * leak).max(0.0);
    Ok(Bound::Value((num / (inputs.m as f64 * leak)).sqrt() / (2.0 * inputs.t)))
}

/// `ε = 3Δ + √(75 ln(2/δ) / (8k))`. Values at or above `1/2` fall outside
/// every uncertainty bound and are reported as a domain error.
pub fn epsilon_from_resources(k: u64, tolerance: f64, delta: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Domain("k must be positive".into()));
    }
    if !(delta > 0.0 && delta <= 1.0) || !(tolerance >= 0.0) {
        return Err(Error::Domain(format!("invalid (Delta, delta) = ({tolerance}, {delta})")));
    }
    let eps = epsilon_for(k, delta, tolerance);
    if eps >= 0.5 {
        return Err(Error::Domain(format!("epsilon = {eps} >= 1/2: bounds inapplicable")));
    }
    Ok(eps)
}

/// `server_lower / client_upper`.
pub fn asymmetry_ratio(inputs: &BoundInputs) -> Result<Bound> {
    let client = client_upper(inputs)?;
    Ok(match server_lower(inputs)? {
        Bound::Value(s) => Bound::Value(s / client),
        Bound::Unbounded => Bound::Unbounded,
    })
}

/// `(1 − δ)^M`, times `(1 − 2e^{−2s̃²})` when `s̃` is given.
pub fn confidence_level(delta: f64, m: u64, s_tilde: Option<f64>) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) || m == 0 {
        return Err(Error::Domain(format!("invalid (delta, M) = ({delta}, {m})")));
    }
    let base = (m as f64 * (-delta).ln_1p()).exp();
    match s_tilde {
        None => Ok(base),
        Some(s) => {
            check_s_tilde(s)?;
            Ok(base * (1.0 - 2.0 * (-2.0 * s * s).exp()))
        }
    }
}

/// `2s̃ / (t√M)`, holding with probability at least `1 − 2e^{−2s̃²}`.
pub fn hoeffding_standard(m: u64, t: f64, s_tilde: f64) -> Result<f64> {
    check_mt(m, t)?;
    check_s_tilde(s_tilde)?;
    // Same operation order as `hoeffding_client_upper` at ε = 0.
    Ok(2.0 * (s_tilde / (m as f64).sqrt()) / t)
}

/// `[2 / (t(1 − 2ε))] (3ε + s̃/√M + √(ε − ε²))`.
pub fn hoeffding_client_upper(inputs: &BoundInputs) -> Result<f64> {
    inputs.check()?;
    let s = inputs.s_tilde()?;
    let eps = inputs.epsilon;
    let inner = 3.0 * eps + s / (inputs.m as f64).sqrt() + inputs.leak().sqrt();
    Ok(2.0 * inner / (inputs.t * (1.0 - 2.0 * eps)))
}

/// `s̃ / (t √M √(ε − ε²))`.
pub fn hoeffding_server_lower(inputs: &BoundInputs) -> Result<Bound> {
    inputs.check()?;
    let s = inputs.s_tilde()?;
    let leak = inputs.leak();
    if leak == 0.0 {
        return Ok(Bound::Unbounded);
    }
    Ok(Bound::Value(s / (inputs.t * (inputs.m as f64).sqrt() * leak.sqrt())))
}

/// `hoeffding_server_lower / hoeffding_client_upper`.
pub fn hoeffding_ratio(inputs: &BoundInputs) -> Result<Bound> {
    let client = hoeffding_client_upper(inputs)?;
    Ok(match hoeffding_server_lower(inputs)? {
        Bound::Value(s) => Bound::Value(s / client),
        Bound::Unbounded => Bound::Unbounded,
    })
}

/// RMS error of an estimator built for `P = x + yω` when the data follow
/// `P′ = x′ + y′ω`, in the small-`ω` limit:
/// `(1/y) √(P′(1 − P′)/M + (x − x′)²)` with `P′` taken at `ω = 0`.
pub fn mismatched_probability_uncertainty(x: f64, y: f64, x_prime: f64, y_prime: f64, m: u64) -> Result<f64> {
    mismatched_probability_uncertainty_at(x, y, x_prime, y_prime, m, 0.0)
}

/// Same as [`mismatched_probability_uncertainty`] at a working point `ω`,
/// keeping the `(y − y′)ω` terms.
pub fn mismatched_probability_uncertainty_at(
    x: f64,
    y: f64,
    x_prime: f64,
    y_prime: f64,
    m: u64,
    omega: f64,
) -> Result<f64> {
    if y == 0.0 || !y.is_finite() {
        return Err(Error::Domain("slope y must be nonzero".into()));
    }
    if m == 0 {
        return Err(Error::Domain("M must be at least 1".into()));
    }
    let p = x_prime + y_prime * omega;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("P' = {p} outside [0, 1]")));
    }
    let dx = x - x_prime;
    let dy = y - y_prime;
    let var = p * (1.0 - p) / m as f64 + dx * dx + dy * dy * omega * omega + 2.0 * dx * dy * omega;
    Ok(var.max(0.0).sqrt() / y.abs())
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn standard_examples() {
        assert_eq!(standard_uncertainty(1, 1.0).unwrap(), 1.0);
        assert!(close(standard_uncertainty(100, 1.0).unwrap(), 0.1, 1e-15));
        assert!(standard_uncertainty(0, 1.0).is_err());
    }

    #[test]
    fn client_examples() {
        for m in [1, 7, 100, 10_000] {
            assert_eq!(client_upper(&BoundInputs::new(0.0, m, 2.0)).unwrap(), standard_uncertainty(m, 2.0).unwrap());
        }
        let v = client_upper(&BoundInputs::new(0.01, 100, 1.0)).unwrap();
        assert!(close(v, (0.01f64 + 0.0396).sqrt(), 1e-15));
        assert!(close(v, 0.2227, 5e-5));
        assert!(close(client_floor(0.01, 1.0).unwrap(), 0.19900, 5e-6));
        assert!(matches!(client_upper(&BoundInputs::new(0.5, 1, 1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn server_examples() {
        let v = server_lower(&BoundInputs::new(0.01, 100, 1.0)).unwrap().unwrap();
        assert!(close(v, 0.5 * (0.9604f64 / 0.99).sqrt(), 1e-15));
        assert!(close(v, 0.4925, 5e-5));
        let v = server_lower(&BoundInputs::new(0.25, 1, 1.0)).unwrap().unwrap();
        assert!(close(v, 0.5 * (0.25f64 / 0.1875).sqrt(), 1e-15));
        assert!(server_lower(&BoundInputs::new(0.0, 10, 1.0)).unwrap().is_unbounded());
        assert!(server_lower(&BoundInputs::new(0.4999999, 10, 1.0)).unwrap().unwrap() < 1e-3);
    }

    #[test]
    fn ratio_examples() {
        let r = asymmetry_ratio(&BoundInputs::new(0.01, 100, 1.0)).unwrap().unwrap();
        assert!(close(r, 0.4925 / 0.2227, 2e-3));
        let eps = epsilon_from_resources(100_000_000, 0.0, 1e-6).unwrap();
        assert!(close(eps, 1.1663e-3, 1e-7));
        let r = asymmetry_ratio(&BoundInputs::new(eps, 1000, 1.0)).unwrap().unwrap();
        assert!(r >= 5.0, "{r}");
        let at = |m| asymmetry_ratio(&BoundInputs::new(0.05, m, 1.0)).unwrap().unwrap();
        assert!(at(10) > at(1000));
    }

    #[test]
    fn resource_epsilon() {
        assert!(close(epsilon_from_resources(1_000_000_000, 0.0, 1e-6).unwrap(), 3.69e-4, 5e-7));
        assert!(epsilon_from_resources(10, 0.0, 1e-3).is_err());
        assert!(epsilon_from_resources(1000, 0.0, 1e-3).unwrap() > epsilon_from_resources(2000, 0.0, 1e-3).unwrap());
    }

    #[test]
    fn confidence_examples() {
        assert!(close(confidence_level(1e-6, 1000, None).unwrap(), 0.999000, 5e-7));
        assert!(close(confidence_level(0.01, 1, None).unwrap(), 0.99, 1e-15));
        let f = confidence_level(0.0, 5, Some(2.0)).unwrap();
        assert!(close(f, 1.0 - 2.0 * (-8.0f64).exp(), 1e-15));
        assert!(close(f, 0.999329, 5e-7));
    }

    #[test]
    fn hoeffding_examples() {
        assert!(close(hoeffding_standard(400, 1.0, 2.0).unwrap(), 0.2, 1e-15));
        assert!(hoeffding_standard(400, 1.0, 0.5).is_err());
        assert!(hoeffding_standard(400, 1.0, min_s_tilde()).is_ok());
        let zero = BoundInputs::new(0.0, 400, 1.0).with_s_tilde(2.0);
        assert_eq!(hoeffding_client_upper(&zero).unwrap(), hoeffding_standard(400, 1.0, 2.0).unwrap());
        let i = BoundInputs::new(0.01, 100, 1.0).with_s_tilde(2.0);
        let c = hoeffding_client_upper(&i).unwrap();
        assert!(close(c, 2.0 / 0.98 * (0.03 + 0.2 + 0.0099f64.sqrt()), 1e-14));
        assert!(close(c, 0.6724, 5e-5));
        let s = hoeffding_server_lower(&i).unwrap().unwrap();
        assert!(close(s, 2.0101, 5e-5));
        assert!(close(s / c, 2.99, 5e-3));
        assert!(hoeffding_server_lower(&zero).unwrap().is_unbounded());
        assert!(hoeffding_client_upper(&BoundInputs::new(0.01, 100, 1.0)).is_err());
    }

    #[test]
    fn mismatched_examples() {
        let t = 1.5;
        let v = mismatched_probability_uncertainty(0.5, t / 2.0, 0.5, t / 2.0, 64).unwrap();
        assert!(close(v, standard_uncertainty(64, t).unwrap(), 1e-15));
        let eps: f64 = 0.01;
        let r_y = 2.0 * (eps - eps * eps).sqrt();
        let r_x = 1.0 - 2.0 * eps;
        let v = mismatched_probability_uncertainty(0.5, 0.5, (1.0 + r_y) / 2.0, r_x / 2.0, 100).unwrap();
        let bound = client_upper(&BoundInputs::new(eps, 100, 1.0)).unwrap();
        assert!(v <= bound);
        // The residual term matches; only the shot-noise term is smaller by (1 − r_y²).
        assert!(close(v * v, (1.0 - r_y * r_y) / 100.0 + r_y * r_y, 1e-14));
        let far = mismatched_probability_uncertainty(0.5, 0.5, (1.0 + r_y) / 2.0, r_x / 2.0, u64::MAX).unwrap();
        assert!(close(far, r_y, 1e-9));
        assert!(mismatched_probability_uncertainty(0.5, 0.0, 0.5, 0.5, 1).is_err());
    }

    proptest! {
        #[test]
        fn monotonicity(eps in 0.001..0.49f64, m in 1u64..100_000, bump in 1.01..3.0f64) {
            let i = BoundInputs::new(eps, m, 1.0);
            let more = BoundInputs::new(eps, m + 1, 1.0);
            prop_assert!(client_upper(&more).unwrap() <= client_upper(&i).unwrap());
            prop_assert!(server_lower(&more).unwrap().unwrap() < server_lower(&i).unwrap().unwrap());
            prop_assert!(asymmetry_ratio(&more).unwrap().unwrap() < asymmetry_ratio(&i).unwrap().unwrap());
            let e2 = (eps * bump).min(0.499);
            if e2 > eps {
                let j = BoundInputs::new(e2, m, 1.0);
                prop_assert!(client_upper(&j).unwrap() > client_upper(&i).unwrap());
                prop_assert!(server_lower(&j).unwrap().unwrap() < server_lower(&i).unwrap().unwrap());
                let (hi, hj) = (i.with_s_tilde(2.0), j.with_s_tilde(2.0));
                prop_assert!(hoeffding_client_upper(&hj).unwrap() > hoeffding_client_upper(&hi).unwrap());
                prop_assert!(hoeffding_server_lower(&hj).unwrap().unwrap() < hoeffding_server_lower(&hi).unwrap().unwrap());
            }
        }
    }
}

//! Pauli channels on the transmitted half of each register.
//!
//! A schedule decides, for register `i` of a round, which Pauli hits the
//! client-bound qubit. The register index is the cursor: it runs over
//! `0..4k` within a round and restarts at zero for the next round, so
//! concurrent rounds never share mutable schedule state.

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{DensityMatrix, Matrix};

/// A single-qubit Pauli operator, up to global phase.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    /// `σ_y`, equal to `iσ_xσ_z`; also accepted as `"XZ"`.
    #[serde(alias = "XZ")]
    Y,
    Z,
}

impl Pauli {
    /// Whether this error flips the `σ_x ⊗ σ_x` stabilizer sign.
    pub fn fails_x_test(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    /// Whether this error flips the `σ_z ⊗ σ_z` stabilizer sign.
    pub fn fails_z_test(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// Probability that a register carrying this error fails a test drawn
    /// uniformly from {X, Z}.
    pub fn fail_weight(self) -> f64 {
        (f64::from(u8::from(self.fails_x_test())) + f64::from(u8::from(self.fails_z_test()))) / 2.0
    }

    /// `(P ⊗ I) ρ (P ⊗ I)†` on a two-qubit state.
    pub fn apply_first(self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != 4 {
            return Err(Error::InvalidArgument("noise acts on two-qubit registers".into()));
        }
        if self == Pauli::I {
            return Ok(*rho);
        }
        // P|a⟩ = φ_a |π(a)⟩ on the high bit; π is an involution, so
        // ρ'_{ij} = φ_{π(i)} φ*_{π(j)} ρ_{π(i)π(j)}.
        let flip = matches!(self, Pauli::X | Pauli::Y);
        let phase = |a: usize| -> C64 {
            match (self, a) {
                (Pauli::Z, 1) => C64::new(-1.0, 0.0),
                (Pauli::Y, 0) => C64::new(0.0, 1.0),
                (Pauli::Y, 1) => C64::new(0.0, -1.0),
                _ => C64::new(1.0, 0.0),
            }
        };
        let perm = |i: usize| if flip { i ^ 2 } else { i };
        let mut m = Matrix::zeros(4)?;
        for i in 0..4 {
            for j in 0..4 {
                let (pi, pj) = (perm(i), perm(j));
                m[(i, j)] = phase(pi >> 1) * phase(pj >> 1).conj() * rho.entry(pi, pj);
            }
        }
        // Unitary conjugation preserves every density-matrix invariant.
        Ok(DensityMatrix::from_matrix_unchecked(m))
    }
}

/// Per-register channel script, configured as a tagged JSON object such as
/// `{"kind": "periodic_pauli", "period": 10, "op": "X"}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseSchedule {
    #[default]
    Identity,
    /// Independent error on every register.
    IidPauli {
        #[serde(default)]
        p_x: f64,
        #[serde(default)]
        p_y: f64,
        #[serde(default)]
        p_z: f64,
    },
    /// Exactly one `op` every `period` registers, at indices `offset,
    /// offset + period, ...`. The offset defaults to `period − 1`.
    PeriodicPauli {
        period: u64,
        op: Pauli,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<u64>,
    },
    /// One explicit Pauli per register index.
    Scripted { ops: Vec<Pauli> },
}

impl NoiseSchedule {
    pub fn iid(p_x: f64, p_y: f64, p_z: f64) -> Result<Self> {
        let s = NoiseSchedule::IidPauli { p_x, p_y, p_z };
        s.validate()?;
        Ok(s)
    }

    pub fn periodic(period: u64, op: Pauli) -> Result<Self> {
        let s = NoiseSchedule::PeriodicPauli { period, op, offset: None };
        s.validate()?;
        Ok(s)
    }

    /// The sparsest periodic schedule the tolerance `Delta` is guaranteed to
    /// absorb: with period `⌈2/Δ⌉` at most `4k/period ≤ 2kΔ` of the `4k`
    /// registers carry an error, so even if every one of them is tested and
    /// fails, the round is accepted.
    pub fn delta_matched(tolerance: f64, op: Pauli) -> Result<Self> {
        if !(tolerance > 0.0 && tolerance <= 1.0) {
            return Err(Error::Configuration(format!("tolerance must lie in (0, 1], got {tolerance}")));
        }
        Self::periodic((2.0 / tolerance).ceil() as u64, op)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            NoiseSchedule::Identity | NoiseSchedule::Scripted { .. } => Ok(()),
            NoiseSchedule::IidPauli { p_x, p_y, p_z } => {
                for p in [p_x, p_y, p_z] {
                    if !(0.0..=1.0).contains(&p) {
                        return Err(Error::Configuration(format!("error probability {p} outside [0, 1]")));
                    }
                }
                if p_x + p_y + p_z > 1.0 + 1e-12 {
                    return Err(Error::Configuration("p_x + p_y + p_z exceeds 1".into()));
                }
                Ok(())
            }
            NoiseSchedule::PeriodicPauli { period, offset, .. } => {
                if period == 0 {
                    return Err(Error::Configuration("period must be at least 1".into()));
                }
                if offset.is_some_and(|o| o >= period) {
                    return Err(Error::Configuration("offset must be smaller than the period".into()));
                }
                Ok(())
            }
        }
    }

    /// The Pauli hitting register `index`.
    pub fn draw<R: Rng + ?Sized>(&self, index: u64, rng: &mut R) -> Result<Pauli> {
        match self {
            NoiseSchedule::Identity => Ok(Pauli::I),
            NoiseSchedule::IidPauli { p_x, p_y, p_z } => {
                let u: f64 = rng.random();
                Ok(if u < *p_x {
                    Pauli::X
                } else if u < p_x + p_y {
                    Pauli::Y
                } else if u < p_x + p_y + p_z {
                    Pauli::Z
                } else {
                    Pauli::I
                })
            }
            NoiseSchedule::PeriodicPauli { period, op, offset } => {
                let offset = offset.unwrap_or(period.saturating_sub(1));
                Ok(if index % period == offset { *op } else { Pauli::I })
            }
            NoiseSchedule::Scripted { ops } => usize::try_from(index)
                .ok()
                .and_then(|i| ops.get(i).copied())
                .ok_or_else(|| {
                    Error::Configuration(format!(
                        "scripted schedule has {} entries, register {index} requested",
                        ops.len()
                    ))
                }),
        }
    }

    /// Fraction of registers expected to fail whichever test they receive,
    /// with X and Z tests equally likely. For a scripted schedule this is the
    /// average over the script.
    pub fn expected_fail_rate(&self) -> f64 {
        match self {
            NoiseSchedule::Identity => 0.0,
            NoiseSchedule::IidPauli { p_x, p_y, p_z } => (p_x + p_z) / 2.0 + p_y,
            NoiseSchedule::PeriodicPauli { period, op, .. } => op.fail_weight() / *period as f64,
            NoiseSchedule::Scripted { ops } if ops.is_empty() => 0.0,
            NoiseSchedule::Scripted { ops } => ops.iter().map(|p| p.fail_weight()).sum::<f64>() / ops.len() as f64,
        }
    }
}

/// Draws the Pauli for `register_index` and applies it to the transmitted
/// (first) qubit.
pub fn apply_noise<R: Rng + ?Sized>(
    rho_pair: &DensityMatrix,
    register_index: u64,
    sched: &NoiseSchedule,
    rng: &mut R,
) -> Result<DensityMatrix> {
    sched.draw(register_index, rng)?.apply_first(rho_pair)
}

/// Free-function form of [`NoiseSchedule::expected_fail_rate`].
pub fn expected_fail_rate(sched: &NoiseSchedule) -> f64 {
    sched.expected_fail_rate()
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::qcore::{bell_state, fidelity_pure, pauli, phi_plus, pauli_pair_measure, Axis};

    fn dense(p: Pauli) -> Matrix {
        let single = match p {
            Pauli::I => pauli::id(),
            Pauli::X => pauli::x(),
            Pauli::Y => pauli::y(),
            Pauli::Z => pauli::z(),
        };
        Matrix::kron(&single, &pauli::id()).unwrap()
    }

    #[test]
    fn fast_conjugation_matches_dense_product() {
        use crate::qcore::{density_from_bloch, BlochVector};
        let a = density_from_bloch(BlochVector::new(0.3, -0.5, 0.2).unwrap()).unwrap();
        let b = density_from_bloch(BlochVector::new(-0.1, 0.4, 0.7).unwrap()).unwrap();
        let product = DensityMatrix::tensor(&a, &b).unwrap();
        let rho = DensityMatrix::mix(&bell_state(0, 1).unwrap(), &product, 0.3).unwrap();
        for p in [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z] {
            let fast = p.apply_first(&rho).unwrap();
            let slow = rho.matrix().conjugate_by(&dense(p));
            assert!(fast.matrix().max_abs_diff(&slow) < 1e-15, "{p:?}");
        }
    }

    #[test]
    fn identity_schedule_is_bit_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let rho = bell_state(1, 1).unwrap();
        let out = apply_noise(&rho, 7, &NoiseSchedule::Identity, &mut rng).unwrap();
        assert_eq!(out, rho);
    }

    #[test]
    fn periodic_x_hits_every_tenth_register() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sched = NoiseSchedule::periodic(10, Pauli::X).unwrap();
        let flipped = bell_state(0, 1).unwrap();
        for i in 0..40u64 {
            let out = apply_noise(&phi_plus(), i, &sched, &mut rng).unwrap();
            let expected = if i % 10 == 9 { flipped } else { phi_plus() };
            assert!(out.matrix().max_abs_diff(expected.matrix()) < 1e-15, "register {i}");
        }
        // The bit-flipped pair fails Z and passes X.
        let (a, b) = pauli_pair_measure(&flipped, Axis::Z, &mut rng).unwrap();
        assert_ne!(a, b);
        let (a, b) = pauli_pair_measure(&flipped, Axis::X, &mut rng).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn iid_bit_flip_fails_z_test_at_rate_p() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sched = NoiseSchedule::iid(0.05, 0.0, 0.0).unwrap();
        let n = 10_000;
        let mut fails = 0;
        for i in 0..n {
            let rho = apply_noise(&phi_plus(), i, &sched, &mut rng).unwrap();
            let (a, b) = pauli_pair_measure(&rho, Axis::Z, &mut rng).unwrap();
            fails += usize::from(a != b);
        }
        assert!((fails as f64 / n as f64 - 0.05).abs() < 0.007, "{fails}");
    }

    #[test]
    fn scripted_schedule_runs_out() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let sched = NoiseSchedule::Scripted { ops: vec![Pauli::X, Pauli::I] };
        assert!(apply_noise(&phi_plus(), 1, &sched, &mut rng).is_ok());
        assert!(matches!(apply_noise(&phi_plus(), 2, &sched, &mut rng), Err(Error::Configuration(_))));
    }

    #[test]
    fn fail_rates_by_case_analysis() {
        assert_eq!(NoiseSchedule::Identity.expected_fail_rate(), 0.0);
        let p = 0.12;
        assert!((NoiseSchedule::iid(p, 0.0, 0.0).unwrap().expected_fail_rate() - p / 2.0).abs() < 1e-15);
        assert!((NoiseSchedule::iid(0.0, p, 0.0).unwrap().expected_fail_rate() - p).abs() < 1e-15);
        for tol in [0.01_f64, 0.05, 0.1, 0.3] {
            for op in [Pauli::X, Pauli::Z, Pauli::Y] {
                let period = (1.0 / tol).ceil() as u64;
                assert!(NoiseSchedule::periodic(period, op).unwrap().expected_fail_rate() <= tol);
            }
        }
    }

    #[test]
    fn delta_matched_schedule_never_exceeds_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for tol in [0.01, 0.05, 0.1, 0.25] {
            let sched = NoiseSchedule::delta_matched(tol, Pauli::Y).unwrap();
            for k in [1u64, 7, 50, 333] {
                let errors = (0..4 * k).filter(|&i| sched.draw(i, &mut rng).unwrap() != Pauli::I).count();
                assert!(errors as f64 <= 2.0 * k as f64 * tol, "tol {tol} k {k}: {errors}");
            }
        }
    }

    #[test]
    fn schedules_parse_from_tagged_json() {
        let s: NoiseSchedule = serde_json::from_str(r#"{"kind":"periodic_pauli","period":10,"op":"XZ"}"#).unwrap();
        assert_eq!(s, NoiseSchedule::PeriodicPauli { period: 10, op: Pauli::Y, offset: None });
        let s: NoiseSchedule = serde_json::from_str(r#"{"kind":"iid_pauli","p_x":0.1}"#).unwrap();
        assert_eq!(s, NoiseSchedule::IidPauli { p_x: 0.1, p_y: 0.0, p_z: 0.0 });
        let s: NoiseSchedule = serde_json::from_str(r#"{"kind":"identity"}"#).unwrap();
        assert_eq!(s, NoiseSchedule::Identity);
        assert!(NoiseSchedule::iid(0.6, 0.6, 0.0).is_err());
        assert!(NoiseSchedule::periodic(0, Pauli::X).is_err());
    }

    proptest! {
        #[test]
        fn bell_basis_is_closed_under_pauli_errors(i in 0u8..2, j in 0u8..2, p in 0usize..4) {
            let p = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z][p];
            let out = p.apply_first(&bell_state(i, j).unwrap()).unwrap();
            out.check_invariants().unwrap();
            let mut total = 0.0;
            let mut max: f64 = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let f = fidelity_pure(&out, &bell_state(a, b).unwrap()).unwrap();
                    total += f;
                    max = max.max(f);
                }
            }
            prop_assert!((total - 1.0).abs() < 1e-12);
            prop_assert!((max - 1.0).abs() < 1e-12);
        }

        #[test]
        fn noisy_outputs_are_valid_states(seed in 0u64..5000, px in 0.0..0.3f64, py in 0.0..0.3f64, pz in 0.0..0.3f64) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sched = NoiseSchedule::iid(px, py, pz).unwrap();
            let rho = DensityMatrix::mix(&phi_plus(), &bell_state(1, 0).unwrap(), 0.7).unwrap();
            let out = apply_noise(&rho, seed, &sched, &mut rng).unwrap();
            out.check_invariants().unwrap();
        }
    }
}

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::Serialize;

use super::analytics::soundness_floor;
use super::TestParams;
use crate::error::{Error, Result};
use crate::noise::{apply_noise, NoiseSchedule};
use crate::qcore::{fidelity_pure, pauli_pair_measure, phi_plus, Axis, DensityMatrix, Matrix, Outcome};

/// What the client does with a register.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    XTest,
    ZTest,
    Target,
    Discard,
}

/// A uniformly random assignment of the `4k` register indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RegisterPartition {
    pub x_set: Vec<u64>,
    pub z_set: Vec<u64>,
    pub target: u64,
    pub discarded: Vec<u64>,
}

impl RegisterPartition {
    /// Per-index role table.
    pub fn roles(&self) -> Vec<Role> {
        let n = self.x_set.len() + self.z_set.len() + 1 + self.discarded.len();
        let mut roles = vec![Role::Discard; n];
        for &i in &self.x_set {
            roles[i as usize] = Role::XTest;
        }
        for &i in &self.z_set {
            roles[i as usize] = Role::ZTest;
        }
        roles[self.target as usize] = Role::Target;
        roles
    }

    pub fn k(&self) -> u64 {
        self.x_set.len() as u64
    }

    /// Checks sizes, disjointness and coverage of `0..4k`.
    pub fn validate(&self) -> Result<()> {
        let k = self.x_set.len();
        if k == 0 || self.z_set.len() != k || self.discarded.len() + 1 != 2 * k {
            return Err(Error::Protocol("partition has the wrong group sizes".into()));
        }
        let mut seen = vec![false; 4 * k];
        let all = self.x_set.iter().chain(&self.z_set).chain(std::iter::once(&self.target)).chain(&self.discarded);
        for &i in all {
            let slot = seen
                .get_mut(i as usize)
                .ok_or_else(|| Error::Protocol(format!("register index {i} out of range")))?;
            if *slot {
                return Err(Error::Protocol(format!("register {i} assigned twice")));
            }
            *slot = true;
        }
        Ok(())
    }
}

/// Shuffles `0..4k` and slices: the first `k` go to the X test, the next `k`
/// to the Z test, then one target, then the `2k − 1` discards.
pub fn partition_registers<R: Rng + ?Sized>(k: u64, rng: &mut R) -> Result<RegisterPartition> {
    if k == 0 {
        return Err(Error::Parameter("k must be positive".into()));
    }
    let mut idx: Vec<u64> = (0..4 * k).collect();
    idx.shuffle(rng);
    let k = k as usize;
    Ok(RegisterPartition {
        x_set: idx[..k].to_vec(),
        z_set: idx[k..2 * k].to_vec(),
        target: idx[2 * k],
        discarded: idx[2 * k + 1..].to_vec(),
    })
}

/// Simulation-only knowledge of the untested registers.
#[derive(Clone, Debug)]
pub struct Omniscient {
    /// The state of the register chosen as target.
    pub target_state: DensityMatrix,
    /// Average over the `2k` untested registers, i.e. the target state
    /// averaged over the uniform choice of target.
    pub ensemble_state: DensityMatrix,
}

impl Omniscient {
    pub fn target_fidelity(&self) -> f64 {
        fidelity_pure(&self.target_state, &phi_plus()).expect("Φ⁺ is pure")
    }

    pub fn ensemble_fidelity(&self) -> f64 {
        fidelity_pure(&self.ensemble_state, &phi_plus()).expect("Φ⁺ is pure")
    }
}

/// Outcome of one sampling test.
#[derive(Clone, Debug, Serialize)]
pub struct TestVerdict {
    pub n_fail: u64,
    pub n_fail_x: u64,
    pub n_fail_z: u64,
    pub accepted: bool,
    /// `1 − ε + 3Δ − 3 N_fail / (2k)`; may be negative.
    pub fidelity_floor: f64,
    #[serde(skip)]
    omniscient: Option<Omniscient>,
}

impl TestVerdict {
    /// Ground truth about the untested registers. Only simulation harnesses
    /// should look here; neither party can.
    pub fn omniscient(&self) -> Option<&Omniscient> {
        self.omniscient.as_ref()
    }
}

/// Bookkeeping for one sampling test, fed one register at a time.
#[derive(Clone, Debug)]
pub struct TestEngine {
    params: TestParams,
    roles: Vec<Role>,
    done: Vec<bool>,
    n_fail_x: u64,
    n_fail_z: u64,
    target: Option<DensityMatrix>,
    ensemble_sum: Matrix,
    untested: u64,
}

impl TestEngine {
    pub fn new(params: TestParams, partition: &RegisterPartition) -> Result<Self> {
        params.validate()?;
        partition.validate()?;
        if partition.k() != params.k {
            return Err(Error::Configuration(format!(
                "partition is for k = {}, parameters say k = {}",
                partition.k(),
                params.k
            )));
        }
        let roles = partition.roles();
        Ok(Self {
            params,
            done: vec![false; roles.len()],
            roles,
            n_fail_x: 0,
            n_fail_z: 0,
            target: None,
            ensemble_sum: Matrix::zeros(4)?,
            untested: 0,
        })
    }

    pub fn params(&self) -> &TestParams {
        &self.params
    }

    pub fn role(&self, index: u64) -> Result<Role> {
        self.roles
            .get(index as usize)
            .copied()
            .ok_or_else(|| Error::Protocol(format!("register index {index} out of range")))
    }

    fn claim(&mut self, index: u64, expected: &[Role]) -> Result<Role> {
        let role = self.role(index)?;
        if !expected.contains(&role) {
            return Err(Error::Protocol(format!("register {index} has role {role:?}, not {expected:?}")));
        }
        let slot = &mut self.done[index as usize];
        if *slot {
            return Err(Error::Protocol(format!("register {index} handled twice")));
        }
        *slot = true;
        Ok(role)
    }

    /// Records the two parties' bits for a tested register. Returns whether
    /// the register passed (equal bits).
    pub fn record_test(&mut self, index: u64, client: Outcome, server: Outcome) -> Result<bool> {
        let role = self.claim(index, &[Role::XTest, Role::ZTest])?;
        let passed = client == server;
        if !passed {
            match role {
                Role::XTest => self.n_fail_x += 1,
                _ => self.n_fail_z += 1,
            }
        }
        Ok(passed)
    }

    /// Axis of the test assigned to `index`, if it is a test register.
    pub fn test_axis(&self, index: u64) -> Result<Option<Axis>> {
        Ok(match self.role(index)? {
            Role::XTest => Some(Axis::X),
            Role::ZTest => Some(Axis::Z),
            _ => None,
        })
    }

    /// Measures a test register in its assigned basis and records the result.
    pub fn measure_test<R: Rng + ?Sized>(
        &mut self,
        index: u64,
        rho: &DensityMatrix,
        rng: &mut R,
    ) -> Result<(Outcome, Outcome)> {
        let axis = self
            .test_axis(index)?
            .ok_or_else(|| Error::Protocol(format!("register {index} is not a test register")))?;
        let (c, s) = pauli_pair_measure(rho, axis, rng)?;
        self.record_test(index, c, s)?;
        Ok((c, s))
    }

    pub fn hold_target(&mut self, index: u64, rho: &DensityMatrix) -> Result<()> {
        self.claim(index, &[Role::Target])?;
        self.target = Some(*rho);
        self.accumulate(rho);
        Ok(())
    }

    pub fn discard(&mut self, index: u64, rho: &DensityMatrix) -> Result<()> {
        self.claim(index, &[Role::Discard])?;
        self.accumulate(rho);
        Ok(())
    }

    fn accumulate(&mut self, rho: &DensityMatrix) {
        self.ensemble_sum = self.ensemble_sum + *rho.matrix();
        self.untested += 1;
    }

    pub fn n_fail(&self) -> u64 {
        self.n_fail_x + self.n_fail_z
    }

    /// Closes the test. Every register must have been handled.
    pub fn verdict(self) -> Result<TestVerdict> {
        if let Some(i) = self.done.iter().position(|d| !d) {
            return Err(Error::Protocol(format!("register {i} was never handled")));
        }
        let n_fail = self.n_fail();
        let p = &self.params;
        let omniscient = self.target.map(|target_state| Omniscient {
            target_state,
            ensemble_state: DensityMatrix::from_matrix_unchecked(
                self.ensemble_sum.scale(C64::new(1.0 / self.untested as f64, 0.0)),
            ),
        });
        Ok(TestVerdict {
            n_fail,
            n_fail_x: self.n_fail_x,
            n_fail_z: self.n_fail_z,
            accepted: p.accepts(n_fail),
            fidelity_floor: soundness_floor(p.epsilon, p.tolerance, p.k, n_fail),
            omniscient,
        })
    }
}

/// Produces the (post-channel) two-qubit register with a given index.
pub trait RegisterSource {
    fn register(&mut self, index: u64, rng: &mut dyn RngCore) -> Result<DensityMatrix>;
}

impl<F> RegisterSource for F
where
    F: FnMut(u64, &mut dyn RngCore) -> Result<DensityMatrix>,
{
    fn register(&mut self, index: u64, rng: &mut dyn RngCore) -> Result<DensityMatrix> {
        self(index, rng)
    }
}

/// `|Φ⁺⟩` pairs sent through a noise schedule.
#[derive(Clone, Debug)]
pub struct NoisyBellSource {
    pub schedule: NoiseSchedule,
}

impl RegisterSource for NoisyBellSource {
    fn register(&mut self, index: u64, rng: &mut dyn RngCore) -> Result<DensityMatrix> {
        apply_noise(&phi_plus(), index, &self.schedule, rng)
    }
}

/// A finite list of registers.
#[derive(Clone, Debug)]
pub struct FixedSource(pub Vec<DensityMatrix>);

impl RegisterSource for FixedSource {
    fn register(&mut self, index: u64, _rng: &mut dyn RngCore) -> Result<DensityMatrix> {
        self.0.get(index as usize).copied().ok_or_else(|| {
            Error::Configuration(format!("register source ran out after {} registers", self.0.len()))
        })
    }
}

/// Batch form of the test: draws the partition, then pulls and handles
/// registers `0..4k` in order.
pub fn run_sampling_test<S, R>(params: TestParams, source: &mut S, rng: &mut R) -> Result<TestVerdict>
where
    S: RegisterSource + ?Sized,
    R: RngCore,
{
    let partition = partition_registers(params.k, rng)?;
    let mut engine = TestEngine::new(params, &partition)?;
    for index in 0..params.registers() {
        let rho = source.register(index, rng)?;
        match engine.role(index)? {
            Role::XTest | Role::ZTest => {
                engine.measure_test(index, &rho, rng)?;
            }
            Role::Target => engine.hold_target(index, &rho)?,
            Role::Discard => engine.discard(index, &rho)?,
        }
    }
    engine.verdict()
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::noise::Pauli;
    use crate::qcore::bell_state;

    fn params(k: u64, tolerance: f64) -> TestParams {
        TestParams { epsilon: 0.9, delta: 0.5, tolerance, k }
    }

    #[test]
    fn smallest_partition_covers_four_registers() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let p = partition_registers(1, &mut rng).unwrap();
        assert_eq!((p.x_set.len(), p.z_set.len(), p.discarded.len()), (1, 1, 1));
        p.validate().unwrap();
        let mut all: Vec<u64> = p.x_set.iter().chain(&p.z_set).chain(&p.discarded).copied().collect();
        all.push(p.target);
        all.sort_unstable();
        assert_eq!(all, vec![0, 1, 2, 3]);
    }

    #[test]
    fn partition_is_exchangeable() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let k = 50;
        let draws = 10_000;
        let mut counts = vec![0u32; 4 * k as usize];
        for _ in 0..draws {
            let p = partition_registers(k, &mut rng).unwrap();
            p.validate().unwrap();
            for i in p.x_set {
                counts[i as usize] += 1;
            }
        }
        for (i, c) in counts.iter().enumerate() {
            let f = *c as f64 / draws as f64;
            assert!((f - 0.25).abs() < 0.02, "index {i}: {f}");
        }
    }

    #[test]
    fn ideal_registers_always_pass() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut src = NoisyBellSource { schedule: NoiseSchedule::Identity };
        for _ in 0..200 {
            let v = run_sampling_test(params(10, 0.0), &mut src, &mut rng).unwrap();
            assert!(v.accepted);
            assert_eq!(v.n_fail, 0);
            assert!((v.omniscient().unwrap().target_fidelity() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn bit_flipped_registers_fail_every_z_test() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in [1, 5, 40] {
            let mut src = FixedSource(vec![bell_state(0, 1).unwrap(); 4 * k as usize]);
            let v = run_sampling_test(params(k, 0.0), &mut src, &mut rng).unwrap();
            assert_eq!(v.n_fail_x, 0);
            assert_eq!(v.n_fail_z, k);
            assert!(!v.accepted);
        }
    }

    #[test]
    fn ensemble_counts_all_untested_registers() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        // Periodic Y on every 4th register: a quarter of the untested
        // registers, on average, carry an error.
        let k = 25;
        let mut src = NoisyBellSource { schedule: NoiseSchedule::periodic(4, Pauli::Y).unwrap() };
        let v = run_sampling_test(params(k, 0.1), &mut src, &mut rng).unwrap();
        let o = v.omniscient().unwrap();
        let f = o.ensemble_fidelity();
        // Fraction of clean registers among the 2k untested is a multiple of 1/(2k).
        let scaled = f * 2.0 * k as f64;
        assert!((scaled - scaled.round()).abs() < 1e-9);
        assert_eq!(v.n_fail + (2 * k - scaled.round() as u64), k);
    }

    #[test]
    fn source_underflow_is_a_configuration_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut src = FixedSource(vec![phi_plus(); 7]);
        assert!(matches!(run_sampling_test(params(2, 0.0), &mut src, &mut rng), Err(Error::Configuration(_))));
    }

    #[test]
    fn engine_rejects_out_of_order_use() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let partition = partition_registers(2, &mut rng).unwrap();
        let mut e = TestEngine::new(params(2, 0.0), &partition).unwrap();
        let x = partition.x_set[0];
        assert!(e.hold_target(x, &phi_plus()).is_err());
        e.measure_test(x, &phi_plus(), &mut rng).unwrap();
        assert!(e.measure_test(x, &phi_plus(), &mut rng).is_err());
        assert!(e.clone().verdict().is_err());
    }
}

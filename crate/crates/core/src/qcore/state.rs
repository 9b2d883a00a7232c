use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::ops::BitXor;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use super::eigen::HermitianEigen;
use super::matrix::{pauli, Matrix, ZERO};
use crate::error::{Error, Result};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
/// Eigenvalues in `[-PSD_TOL, 0)` are clamped to zero; anything lower is an error.
pub const PSD_TOL: f64 = 1e-10;
pub const BLOCH_TOL: f64 = 1e-10;

/// A one- or two-qubit density matrix. For two qubits the first tensor
/// factor is the client-bound (transmitted) qubit and the second is the
/// server's.
#[derive(Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Matrix,
}

impl DensityMatrix {
    /// Validates `m` as a density matrix. Slightly negative eigenvalues left
    /// by floating-point drift are clamped and the trace renormalized.
    pub fn new(m: Matrix) -> Result<Self> {
        let defect = m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}, expected 1")));
        }
        let eig = HermitianEigen::new(&m);
        let min = eig.eigenvalues()[0];
        if min >= 0.0 {
            return Ok(Self { m });
        }
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        let clamped = eig.reconstruct(|x| x.max(0.0));
        let norm = clamped.trace().re;
        Ok(Self { m: clamped.scale(C64::new(1.0 / norm, 0.0)) })
    }

    /// Wraps a matrix produced by a validity-preserving map.
    pub(crate) fn from_matrix_unchecked(m: Matrix) -> Self {
        Self { m }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if norm2 <= 0.0 || !norm2.is_finite() {
            return Err(Error::InvalidArgument("state vector must be nonzero".into()));
        }
        let m = Matrix::outer(psi)?.scale(C64::new(1.0 / norm2, 0.0));
        Ok(Self { m })
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let m = Matrix::identity(dim)?.scale(C64::new(1.0 / dim as f64, 0.0));
        Ok(Self { m })
    }

    /// `ρ_a ⊗ ρ_b` for two single-qubit states.
    pub fn tensor(a: &Self, b: &Self) -> Result<Self> {
        Ok(Self { m: Matrix::kron(&a.m, &b.m)? })
    }

    /// `λ a + (1 − λ) b`.
    pub fn mix(a: &Self, b: &Self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidArgument(format!("mixing weight {lambda} outside [0, 1]")));
        }
        if a.dim() != b.dim() {
            return Err(Error::InvalidArgument("cannot mix states of different dimension".into()));
        }
        Ok(Self {
            m: a.m.scale(C64::new(lambda, 0.0)) + b.m.scale(C64::new(1.0 - lambda, 0.0)),
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.dim()
    }

    pub fn entry(&self, r: usize, c: usize) -> C64 {
        self.m[(r, c)]
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> Vec<f64> {
        HermitianEigen::new(&self.m).eigenvalues()
    }

    pub fn purity(&self) -> f64 {
        self.m.trace_product(&self.m).re
    }

    /// `U ρ U†`.
    pub fn apply_unitary(&self, u: &Matrix) -> Result<Self> {
        if u.dim() != self.dim() {
            return Err(Error::InvalidArgument("unitary dimension mismatch".into()));
        }
        Ok(Self { m: self.m.conjugate_by(u) })
    }

    /// Re-checks every density-matrix invariant without clamping.
    pub fn check_invariants(&self) -> Result<()> {
        let defect = self.m.hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = self.m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace is {tr}")));
        }
        let min = self.eigenvalues()[0];
        if min < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
        }
        Ok(())
    }
}

impl fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "DensityMatrix{:?}", self.m)
    }
}

/// Real 3-vector `(r_x, r_y, r_z)` of the qubit state `(I + r·σ)/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub r_x: f64,
    pub r_y: f64,
    pub r_z: f64,
}

impl BlochVector {
    pub const ORIGIN: Self = Self { r_x: 0.0, r_y: 0.0, r_z: 0.0 };

    pub fn new(r_x: f64, r_y: f64, r_z: f64) -> Result<Self> {
        let b = Self { r_x, r_y, r_z };
        b.validate()?;
        Ok(b)
    }

    /// `R (sin θ cos φ, sin θ sin φ, cos θ)`.
    pub fn from_polar(r: f64, theta: f64, phi: f64) -> Result<Self> {
        Self::new(r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos())
    }

    pub fn norm(&self) -> f64 {
        (self.r_x * self.r_x + self.r_y * self.r_y + self.r_z * self.r_z).sqrt()
    }

    fn validate(&self) -> Result<()> {
        let n2 = self.r_x * self.r_x + self.r_y * self.r_y + self.r_z * self.r_z;
        if !n2.is_finite() || n2 > 1.0 + BLOCH_TOL {
            return Err(Error::InvalidState(format!("Bloch vector norm² {n2} exceeds 1")));
        }
        Ok(())
    }
}

/// `(I + r_x σ_x + r_y σ_y + r_z σ_z) / 2`.
pub fn density_from_bloch(b: BlochVector) -> Result<DensityMatrix> {
    b.validate()?;
    let half = C64::new(0.5, 0.0);
    let m = (pauli::id()
        + pauli::x().scale(C64::new(b.r_x, 0.0))
        + pauli::y().scale(C64::new(b.r_y, 0.0))
        + pauli::z().scale(C64::new(b.r_z, 0.0)))
    .scale(half);
    Ok(DensityMatrix { m })
}

pub fn bloch_from_density(rho: &DensityMatrix) -> Result<BlochVector> {
    if rho.dim() != 2 {
        return Err(Error::InvalidArgument("Bloch vectors describe single qubits".into()));
    }
    Ok(BlochVector {
        r_x: rho.m.trace_product(&pauli::x()).re,
        r_y: rho.m.trace_product(&pauli::y()).re,
        r_z: rho.m.trace_product(&pauli::z()).re,
    })
}

/// `|β_ij⟩ = (σ_z^i σ_x^j ⊗ I)(|00⟩ + |11⟩)/√2` as an amplitude vector.
pub fn bell_vector(i: u8, j: u8) -> Result<[C64; 4]> {
    if i > 1 || j > 1 {
        return Err(Error::InvalidArgument(format!("Bell indices must be bits, got ({i}, {j})")));
    }
    let h = C64::new(FRAC_1_SQRT_2, 0.0);
    let mut v = [h, ZERO, ZERO, h];
    if j == 1 {
        // σ_x on the first qubit swaps |0b⟩ and |1b⟩.
        v.swap(0, 2);
        v.swap(1, 3);
    }
    if i == 1 {
        v[2] = -v[2];
        v[3] = -v[3];
    }
    Ok(v)
}

pub fn bell_state(i: u8, j: u8) -> Result<DensityMatrix> {
    DensityMatrix::pure(&bell_vector(i, j)?)
}

/// `|Φ⁺⟩⟨Φ⁺|`.
pub fn phi_plus() -> DensityMatrix {
    bell_state(0, 0).expect("valid Bell indices")
}

/// Angular frequency and timing of one Ramsey interrogation (`ħ = 1`).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SensingField {
    pub omega: f64,
    pub t: f64,
    #[serde(default)]
    pub t_p: f64,
    #[serde(default)]
    pub t_r: f64,
    /// Total time budget.
    #[serde(default, rename = "T", skip_serializing_if = "Option::is_none")]
    pub total_time: Option<f64>,
}

impl SensingField {
    pub fn new(omega: f64, t: f64) -> Result<Self> {
        let f = Self { omega, t, t_p: 0.0, t_r: 0.0, total_time: None };
        f.validate()?;
        Ok(f)
    }

    pub fn with_budget(mut self, t_p: f64, t_r: f64, total_time: f64) -> Result<Self> {
        self.t_p = t_p;
        self.t_r = t_r;
        self.total_time = Some(total_time);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > 0.0) || !self.t.is_finite() {
            return Err(Error::InvalidArgument(format!("interaction time must be positive, got {}", self.t)));
        }
        if !(self.t_p >= 0.0) || !(self.t_r >= 0.0) {
            return Err(Error::InvalidArgument("preparation and readout times must be non-negative".into()));
        }
        if !self.omega.is_finite() {
            return Err(Error::InvalidArgument("omega must be finite".into()));
        }
        if let Some(m) = self.repetitions() {
            if m < 1 {
                return Err(Error::InvalidArgument("time budget allows no repetition".into()));
            }
        }
        Ok(())
    }

    /// Dimensionless accumulated phase `ωt`.
    pub fn phase(&self) -> f64 {
        self.omega * self.t
    }

    /// `M = ⌊T / (t_p + t + t_r)⌋` when a budget is set.
    pub fn repetitions(&self) -> Option<u64> {
        self.total_time.map(|total| (total / (self.t_p + self.t + self.t_r)).floor().max(0.0) as u64)
    }
}

/// `e^{-iωtσ_z/2} ρ e^{+iωtσ_z/2}`, exact.
pub fn evolve_phase(rho: &DensityMatrix, field: &SensingField) -> Result<DensityMatrix> {
    evolve_by_phase(rho, field.phase())
}

/// Same as [`evolve_phase`] for a bare phase `ωt`.
pub fn evolve_by_phase(rho: &DensityMatrix, phase: f64) -> Result<DensityMatrix> {
    if rho.dim() != 2 {
        return Err(Error::InvalidArgument("phase evolution acts on a single qubit".into()));
    }
    // Only the coherence picks up a phase: ρ01 -> e^{-iωt} ρ01.
    let mut m = rho.m;
    let rot = C64::from_polar(1.0, -phase);
    m[(0, 1)] *= rot;
    m[(1, 0)] *= rot.conj();
    Ok(DensityMatrix { m })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subsystem {
    /// The client-bound qubit.
    First,
    /// The server's qubit.
    Second,
}

pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::InvalidArgument("partial trace needs a two-qubit state".into()));
    }
    let mut out = Matrix::zeros(2)?;
    for x in 0..2 {
        for y in 0..2 {
            out[(x, y)] = (0..2)
                .map(|traced| match keep {
                    Subsystem::First => rho.m[(2 * x + traced, 2 * y + traced)],
                    Subsystem::Second => rho.m[(2 * traced + x, 2 * traced + y)],
                })
                .sum();
        }
    }
    Ok(DensityMatrix { m: out })
}

/// `⟨ψ|ρ|ψ⟩` for a rank-1 reference `ψ`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &DensityMatrix) -> Result<f64> {
    if rho.dim() != psi.dim() {
        return Err(Error::InvalidArgument("fidelity between states of different dimension".into()));
    }
    if (psi.purity() - 1.0).abs() > PSD_TOL {
        return Err(Error::InvalidArgument(format!(
            "reference state is not rank-1 (purity {})",
            psi.purity()
        )));
    }
    // Column of the largest diagonal entry is proportional to |ψ⟩.
    let d = psi.dim();
    let col = (0..d)
        .max_by(|&a, &b| psi.m[(a, a)].re.total_cmp(&psi.m[(b, b)].re))
        .expect("non-empty");
    let scale = 1.0 / psi.m[(col, col)].re.sqrt();
    let v: Vec<C64> = (0..d).map(|r| psi.m[(r, col)] * scale).collect();
    Ok(expectation_vector(rho, &v).clamp(0.0, 1.0))
}

/// `⟨v|ρ|v⟩` without any checks.
#[allow(clippy::needless_range_loop)]
pub(crate) fn expectation_vector(rho: &DensityMatrix, v: &[C64]) -> f64 {
    let d = rho.dim();
    let mut acc = ZERO;
    for r in 0..d {
        if v[r] == ZERO {
            continue;
        }
        let mut row = ZERO;
        for c in 0..d {
            row += rho.m[(r, c)] * v[c];
        }
        acc += v[r].conj() * row;
    }
    acc.re
}

/// `F(I/2, ρ) = 1/2 + √(1 − R²)/2` for a qubit with Bloch radius `R`.
pub fn fidelity_maximally_mixed(rho: &DensityMatrix) -> Result<f64> {
    let b = bloch_from_density(rho)?;
    let r2 = (b.r_x * b.r_x + b.r_y * b.r_y + b.r_z * b.r_z).min(1.0);
    Ok(0.5 + 0.5 * (1.0 - r2).sqrt())
}

/// A single classical measurement bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub struct Outcome(bool);

impl Outcome {
    pub const ZERO: Self = Self(false);
    pub const ONE: Self = Self(true);

    pub fn from_bit(bit: u8) -> Result<Self> {
        match bit {
            0 => Ok(Self::ZERO),
            1 => Ok(Self::ONE),
            _ => Err(Error::InvalidArgument(format!("outcome bit must be 0 or 1, got {bit}"))),
        }
    }

    pub fn bit(self) -> u8 {
        u8::from(self.0)
    }

    pub fn is_one(self) -> bool {
        self.0
    }

    pub fn flipped(self) -> Self {
        Self(!self.0)
    }
}

impl From<bool> for Outcome {
    fn from(b: bool) -> Self {
        Self(b)
    }
}

impl From<Outcome> for u8 {
    fn from(o: Outcome) -> u8 {
        o.bit()
    }
}

impl TryFrom<u8> for Outcome {
    type Error = Error;

    fn try_from(bit: u8) -> Result<Self> {
        Self::from_bit(bit)
    }
}

impl BitXor for Outcome {
    type Output = Outcome;

    fn bitxor(self, rhs: Outcome) -> Outcome {
        Outcome(self.0 ^ rhs.0)
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.bit())
    }
}

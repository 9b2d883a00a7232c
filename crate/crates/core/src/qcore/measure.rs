use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64 as C64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::matrix::{pauli, Matrix, I, ONE, ZERO};
use super::state::{expectation_vector, DensityMatrix, Outcome};
use crate::error::{Error, Result};

const IDEMPOTENT_TOL: f64 = 1e-10;
const PROBABILITY_TOL: f64 = 1e-12;

/// Single-qubit Pauli measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn pauli(self) -> Matrix {
        match self {
            Axis::X => pauli::x(),
            Axis::Y => pauli::y(),
            Axis::Z => pauli::z(),
        }
    }

    /// Normalized eigenvectors `(|+1⟩, |−1⟩)` of `σ_axis`.
    pub(crate) fn eigenvectors(self) -> ([C64; 2], [C64; 2]) {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        match self {
            Axis::X => ([h, h], [h, -h]),
            Axis::Y => ([h, I * h], [h, -I * h]),
            Axis::Z => ([ONE, ZERO], [ZERO, ONE]),
        }
    }

    /// `(I + σ_axis)/2`, the projector reported as outcome bit 1.
    pub fn plus_projector(self) -> Matrix {
        (pauli::id() + self.pauli()).scale(C64::new(0.5, 0.0))
    }
}

/// Real `Tr[𝒫 ρ]` for a Hermitian idempotent `𝒫`.
pub fn born_probability(rho: &DensityMatrix, projector: &Matrix) -> Result<f64> {
    if projector.dim() != rho.dim() {
        return Err(Error::InvalidObservable("projector dimension mismatch".into()));
    }
    if projector.hermiticity_defect() > IDEMPOTENT_TOL {
        return Err(Error::InvalidObservable("projector is not Hermitian".into()));
    }
    let defect = (*projector * *projector).max_abs_diff(projector);
    if defect > IDEMPOTENT_TOL {
        return Err(Error::InvalidObservable(format!("projector is not idempotent (defect {defect:.3e})")));
    }
    let p = projector.trace_product(rho.matrix());
    if p.im.abs() > PROBABILITY_TOL {
        return Err(Error::InvalidObservable(format!("Tr[Pρ] has imaginary part {}", p.im)));
    }
    if p.re < -PROBABILITY_TOL || p.re > 1.0 + PROBABILITY_TOL {
        return Err(Error::InvalidObservable(format!("Tr[Pρ] = {} outside [0, 1]", p.re)));
    }
    Ok(p.re.clamp(0.0, 1.0))
}

/// Projective `σ_axis` measurement of a qubit. Bit 1 is the `+1` eigenvalue,
/// i.e. the projector `(I + σ_axis)/2`. Returns the Lüders post-measurement state.
pub fn sample_outcome<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    axis: Axis,
    rng: &mut R,
) -> Result<(Outcome, DensityMatrix)> {
    if rho.dim() != 2 {
        return Err(Error::InvalidArgument("sample_outcome measures a single qubit".into()));
    }
    let (plus, minus) = axis.eigenvectors();
    let p_one = expectation_vector(rho, &plus).clamp(0.0, 1.0);
    let outcome = Outcome::from(rng.random::<f64>() < p_one);
    let v = if outcome.is_one() { plus } else { minus };
    let post = DensityMatrix::from_matrix_unchecked(Matrix::outer(&v)?);
    Ok((outcome, post))
}

/// Joint `σ_axis ⊗ σ_axis` measurement of a two-qubit register, sampled in the
/// product eigenbasis. Returns `(client bit, server bit)`, each with the same
/// bit convention as [`sample_outcome`].
pub fn pauli_pair_measure<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    axis: Axis,
    rng: &mut R,
) -> Result<(Outcome, Outcome)> {
    if rho.dim() != 4 {
        return Err(Error::InvalidArgument("pauli_pair_measure needs a two-qubit state".into()));
    }
    if axis == Axis::Y {
        return Err(Error::InvalidArgument("the sampling test uses X or Z pair measurements".into()));
    }
    let probs = pair_probabilities(rho, axis);
    let u = rng.random::<f64>() * probs.iter().sum::<f64>();
    let mut acc = 0.0;
    for (idx, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc || idx == 3 {
            // idx = 2c + s with 0 meaning the +1 eigenvector.
            let client = Outcome::from(idx >> 1 == 0);
            let server = Outcome::from(idx & 1 == 0);
            return Ok((client, server));
        }
    }
    unreachable!("loop returns on the last index")
}

/// Probabilities of `(c, s)` in `{+,−}²`, indexed `2c + s` with `0 = +1`.
pub(crate) fn pair_probabilities(rho: &DensityMatrix, axis: Axis) -> [f64; 4] {
    if axis == Axis::Z {
        return [0, 1, 2, 3].map(|i| rho.entry(i, i).re.max(0.0));
    }
    let (plus, minus) = axis.eigenvectors();
    let basis = [plus, minus];
    let mut out = [0.0; 4];
    for c in 0..2 {
        for s in 0..2 {
            let v = kron_vec(&basis[c], &basis[s]);
            out[2 * c + s] = expectation_vector(rho, &v).max(0.0);
        }
    }
    out
}

fn kron_vec(a: &[C64; 2], b: &[C64; 2]) -> [C64; 4] {
    [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]]
}

/// Measures only the first (client) qubit of a register along `axis` and
/// returns the outcome together with the normalized state of the second
/// qubit. Bits follow the [`sample_outcome`] convention.
pub fn measure_first_qubit<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    axis: Axis,
    rng: &mut R,
) -> Result<(Outcome, DensityMatrix)> {
    if rho.dim() != 4 {
        return Err(Error::InvalidArgument("measure_first_qubit needs a two-qubit state".into()));
    }
    let (plus, minus) = axis.eigenvectors();
    let (conditional_plus, p_plus) = conditional_second(rho, &plus);
    let outcome = Outcome::from(rng.random::<f64>() < p_plus);
    let state = if outcome.is_one() {
        conditional_plus
    } else {
        conditional_second(rho, &minus).0
    };
    Ok((outcome, state))
}

/// `⟨π|₁ ρ |π⟩₁` normalized, with its probability.
fn conditional_second(rho: &DensityMatrix, pi: &[C64; 2]) -> (DensityMatrix, f64) {
    let mut m = Matrix::zeros(2).expect("dimension 2");
    for b in 0..2 {
        for b2 in 0..2 {
            let mut acc = ZERO;
            for a in 0..2 {
                for a2 in 0..2 {
                    acc += pi[a].conj() * rho.entry(2 * a + b, 2 * a2 + b2) * pi[a2];
                }
            }
            m[(b, b2)] = acc;
        }
    }
    let p = m.trace().re.clamp(0.0, 1.0);
    if p > 0.0 {
        m = m.scale(C64::new(1.0 / p, 0.0));
    } else {
        // Zero-probability branch; never sampled.
        m = Matrix::identity(2).expect("dimension 2").scale(C64::new(0.5, 0.0));
    }
    (DensityMatrix::from_matrix_unchecked(m), p)
}

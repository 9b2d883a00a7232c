//! Hermitian eigendecomposition for 2x2 and 4x4 matrices.
//!
//! An `n x n` Hermitian `H = A + iB` is embedded as the real symmetric
//! `2n x 2n` matrix `[[A, -B], [B, A]]`, whose spectrum is that of `H` with
//! every eigenvalue doubled. Cyclic Jacobi sweeps diagonalize the embedding.

use super::matrix::Matrix;
use num_complex::Complex64 as C64;

const MAX_N: usize = 8;
const MAX_SWEEPS: usize = 64;

/// Eigenvalues (ascending) and, when requested, the reconstruction of `H`
/// with its spectrum passed through `f`.
pub(crate) struct HermitianEigen {
    n: usize,
    values: [f64; MAX_N],
    vectors: [[f64; MAX_N]; MAX_N],
}

impl HermitianEigen {
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn new(h: &Matrix) -> Self {
        let d = h.dim();
        let n = 2 * d;
        let mut a = [[0.0_f64; MAX_N]; MAX_N];
        for r in 0..d {
            for c in 0..d {
                // Hermitian part only; callers check hermiticity separately.
                let z = (h[(r, c)] + h[(c, r)].conj()) * 0.5;
                a[r][c] = z.re;
                a[r + d][c + d] = z.re;
                a[r + d][c] = z.im;
                a[r][c + d] = -z.im;
            }
        }
        let mut v = [[0.0_f64; MAX_N]; MAX_N];
        for (i, row) in v.iter_mut().enumerate().take(n) {
            row[i] = 1.0;
        }

        for _ in 0..MAX_SWEEPS {
            let off: f64 = (0..n)
                .flat_map(|p| (0..n).filter(move |&q| q != p).map(move |q| (p, q)))
                .map(|(p, q)| a[p][q] * a[p][q])
                .sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                    for row in v.iter_mut().take(n) {
                        let (vkp, vkq) = (row[p], row[q]);
                        row[p] = c * vkp - s * vkq;
                        row[q] = s * vkp + c * vkq;
                    }
                }
            }
        }

        let mut values = [0.0; MAX_N];
        for (i, val) in values.iter_mut().enumerate().take(n) {
            *val = a[i][i];
        }
        Self { n, values, vectors: v }
    }

    /// The `n/2` eigenvalues of the complex matrix, ascending.
    pub(crate) fn eigenvalues(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.values[..self.n].to_vec();
        all.sort_by(f64::total_cmp);
        // Each eigenvalue appears twice in the embedding.
        all.chunks(2).map(|pair| 0.5 * (pair[0] + pair[1])).collect()
    }

    /// Rebuilds `Σ f(λ) |v⟩⟨v|` from the real embedding.
    #[allow(clippy::needless_range_loop)]
    pub(crate) fn reconstruct(&self, f: impl Fn(f64) -> f64) -> Matrix {
        let n = self.n;
        let d = n / 2;
        let mut r = [[0.0_f64; MAX_N]; MAX_N];
        for k in 0..n {
            let lam = f(self.values[k]);
            for i in 0..n {
                for j in 0..n {
                    r[i][j] += lam * self.vectors[i][k] * self.vectors[j][k];
                }
            }
        }
        let mut out = Matrix::zeros(d).expect("dimension from a valid matrix");
        for i in 0..d {
            for j in 0..d {
                let re = 0.5 * (r[i][j] + r[i + d][j + d]);
                let im = 0.5 * (r[i + d][j] - r[i][j + d]);
                out[(i, j)] = C64::new(re, im);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::matrix::pauli;

    #[test]
    fn pauli_y_spectrum() {
        let e = HermitianEigen::new(&pauli::y()).eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-14 && (e[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn reconstruct_identity_map_round_trips() {
        let h = Matrix::kron(&pauli::y(), &pauli::x()).unwrap() + Matrix::kron(&pauli::z(), &pauli::id()).unwrap();
        let eig = HermitianEigen::new(&h);
        assert!(eig.reconstruct(|x| x).max_abs_diff(&h) < 1e-12);
    }
}

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);
pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A square complex matrix of dimension 2 or 4, stored inline row-major.
#[derive(Clone, Copy, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: [C64; 16],
}

impl Matrix {
    pub fn zeros(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        Ok(Self { dim, data: [ZERO; 16] })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        Ok(m)
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::InvalidArgument(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                entries.len()
            )));
        }
        let mut data = [ZERO; 16];
        data[..entries.len()].copy_from_slice(entries);
        Ok(Self { dim, data })
    }

    pub(crate) fn from_rows2(rows: [[C64; 2]; 2]) -> Self {
        let mut data = [ZERO; 16];
        for (r, row) in rows.iter().enumerate() {
            data[r * 2..r * 2 + 2].copy_from_slice(row);
        }
        Self { dim: 2, data }
    }

    /// `|v⟩⟨v|` for a vector of length 2 or 4.
    pub fn outer(v: &[C64]) -> Result<Self> {
        let mut m = Self::zeros(v.len())?;
        for r in 0..v.len() {
            for c in 0..v.len() {
                m[(r, c)] = v[r] * v[c].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[C64] {
        &self.data[..self.dim * self.dim]
    }

    pub fn adjoint(&self) -> Self {
        let mut out = *self;
        for r in 0..self.dim {
            for c in 0..self.dim {
                out[(r, c)] = self[(c, r)].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut out = *self;
        out.data.iter_mut().for_each(|z| *z *= s);
        out
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.entries()
            .iter()
            .zip(other.entries())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |A - A†|` entrywise.
    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `U A U†`.
    pub fn conjugate_by(&self, u: &Self) -> Self {
        *u * *self * u.adjoint()
    }

    /// Kronecker product of two 2x2 matrices.
    pub fn kron(a: &Self, b: &Self) -> Result<Self> {
        if a.dim != 2 || b.dim != 2 {
            return Err(Error::InvalidArgument("kron is defined for 2x2 factors only".into()));
        }
        let mut out = Self { dim: 4, data: [ZERO; 16] };
        for (ar, ac, br, bc) in bit_quads() {
            out[(2 * ar + br, 2 * ac + bc)] = a[(ar, ac)] * b[(br, bc)];
        }
        Ok(out)
    }

    /// `Tr[A B]`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let d = self.dim;
        let mut acc = ZERO;
        for r in 0..d {
            for c in 0..d {
                acc += self[(r, c)] * other[(c, r)];
            }
        }
        acc
    }
}

fn bit_quads() -> impl Iterator<Item = (usize, usize, usize, usize)> {
    (0..16).map(|n| ((n >> 3) & 1, (n >> 2) & 1, (n >> 1) & 1, n & 1))
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("dimension must be 2 or 4, got {dim}")))
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.dim && c < self.dim);
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.dim && c < self.dim);
        &mut self.data[r * self.dim + c]
    }
}

impl Mul for Matrix {
    type Output = Matrix;

    fn mul(self, rhs: Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let d = self.dim;
        let mut out = Matrix { dim: d, data: [ZERO; 16] };
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..d {
                    out.data[r * d + c] += a * rhs.data[k * d + c];
                }
            }
        }
        out
    }
}

impl Add for Matrix {
    type Output = Matrix;

    fn add(mut self, rhs: Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a += b);
        self
    }
}

impl Sub for Matrix {
    type Output = Matrix;

    fn sub(mut self, rhs: Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        self.data.iter_mut().zip(rhs.data.iter()).for_each(|(a, b)| *a -= b);
        self
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            write!(f, "  ")?;
            for c in 0..self.dim {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Single-qubit Pauli matrices.
pub mod pauli {
    use super::*;

    pub fn x() -> Matrix {
        Matrix::from_rows2([[ZERO, ONE], [ONE, ZERO]])
    }

    pub fn y() -> Matrix {
        Matrix::from_rows2([[ZERO, -I], [I, ZERO]])
    }

    pub fn z() -> Matrix {
        Matrix::from_rows2([[ONE, ZERO], [ZERO, -ONE]])
    }

    pub fn id() -> Matrix {
        Matrix::from_rows2([[ONE, ZERO], [ZERO, ONE]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pauli_algebra() {
        let (x, y, z) = (pauli::x(), pauli::y(), pauli::z());
        // XY = iZ
        assert!((x * y).max_abs_diff(&z.scale(I)) < 1e-15);
        assert!((x * x).max_abs_diff(&pauli::id()) < 1e-15);
        assert_eq!(y.hermiticity_defect(), 0.0);
    }

    #[test]
    fn kron_layout_puts_first_factor_on_high_bit() {
        let k = Matrix::kron(&pauli::x(), &pauli::id()).unwrap();
        // X ⊗ I maps |00⟩ -> |10⟩, i.e. column 0 has its 1 in row 2.
        assert_eq!(k[(2, 0)], ONE);
        assert_eq!(k[(0, 0)], ZERO);
    }

    #[test]
    fn rejects_bad_dimension() {
        assert!(Matrix::zeros(3).is_err());
        assert!(Matrix::from_row_major(2, &[ONE; 3]).is_err());
    }
}

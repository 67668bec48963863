use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dimension above which [`ComplexMatrix::op_norm`] falls back to the Frobenius norm.
pub const OP_NORM_DIM_LIMIT: usize = 512;

/// Dense square complex matrix over a truncated basis.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix({}x{})", self.dim(), self.dim())
    }
}

impl ComplexMatrix {
    /// Wraps a nalgebra matrix, rejecting non-square or non-finite input.
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() != inner.ncols() {
            return Err(Error::DimensionMismatch {
                expected: inner.nrows(),
                found: inner.ncols(),
            });
        }
        if !inner.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::Overflow);
        }
        Ok(Self(inner))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn from_fn(dim: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(DMatrix::from_fn(dim, dim, f))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = DMatrix::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        Self(m)
    }

    /// Rank-one operator |ket><bra|.
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Self {
        assert_eq!(ket.len(), bra.len());
        Self::from_fn(ket.len(), |i, j| ket[i] * bra[j].conj())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn inner(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self(&self.0 * c)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        self.0.column(j).iter().copied().collect()
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim());
        let n = self.dim();
        (0..n)
            .map(|i| (0..n).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `[self, other] = self*other - other*self`.
    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest singular value; Frobenius norm (an over-bound) above
    /// [`OP_NORM_DIM_LIMIT`].
    pub fn op_norm(&self) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        if self.dim() > OP_NORM_DIM_LIMIT {
            return self.frobenius_norm();
        }
        self.0
            .clone()
            .singular_values()
            .iter()
            .fold(0.0_f64, |acc, s| acc.max(*s))
    }

    /// Leading `rank x rank` block.
    pub fn leading_block(&self, rank: usize) -> Self {
        assert!(rank <= self.dim());
        Self(self.0.view((0, 0), (rank, rank)).into_owned())
    }

    /// Rectangular selection `self[rows, cols]` as a raw nalgebra matrix.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> DMatrix<Complex64> {
        DMatrix::from_fn(rows.len(), cols.len(), |i, j| self.0[(rows[i], cols[j])])
    }

    /// Square selection `self[idx, idx]`.
    pub fn principal(&self, idx: &[usize]) -> Self {
        Self(self.select(idx, idx))
    }

    /// `(left * middle * right)[rows, cols]` without forming the full product.
    pub fn restricted_product(
        left: &Self,
        middle: &Self,
        right: &Self,
        rows: &[usize],
        cols: &[usize],
    ) -> DMatrix<Complex64> {
        let all: Vec<usize> = (0..right.dim()).collect();
        let right_cols = right.select(&all, cols);
        let tail = &middle.0 * right_cols;
        let left_rows = left.select(rows, &(0..left.dim()).collect::<Vec<_>>());
        left_rows * tail
    }

    /// Kronecker product with row-major pairing `(i, k) -> i * dim(other) + k`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// True when every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == Complex64::new(0.0, 0.0)))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, idx: (usize, usize)) -> &Complex64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut Complex64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

/// Operator norm of a rectangular block (largest singular value).
pub fn block_op_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, s| acc.max(*s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_non_finite() {
        let mut m = DMatrix::zeros(2, 2);
        m[(0, 1)] = c(f64::NAN, 0.0);
        assert_eq!(ComplexMatrix::new(m), Err(Error::Overflow));
    }

    #[test]
    fn op_norm_of_diagonal_is_max_modulus() {
        let m = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(0.0, -3.0), c(2.0, 0.0)]);
        assert!((m.op_norm() - 3.0).abs() < 1e-14);
        assert!(m.frobenius_norm() >= m.op_norm());
    }

    #[test]
    fn restricted_product_matches_full_product() {
        let a = ComplexMatrix::from_fn(5, |i, j| c(i as f64 - j as f64, (i * j) as f64 * 0.1));
        let b = ComplexMatrix::from_fn(5, |i, j| c(((i + 2 * j) % 3) as f64, 0.5));
        let d = ComplexMatrix::from_fn(5, |i, j| c(1.0 / (1.0 + (i + j) as f64), -0.2));
        let full = &(&a * &b) * &d;
        let rows = [0, 3];
        let cols = [1, 2, 4];
        let part = ComplexMatrix::restricted_product(&a, &b, &d, &rows, &cols);
        for (i, &r) in rows.iter().enumerate() {
            for (j, &cc) in cols.iter().enumerate() {
                assert!((part[(i, j)] - full[(r, cc)]).norm() < 1e-12);
            }
        }
    }
}

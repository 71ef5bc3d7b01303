//! Dense complex matrices.
//!
//! [`ComplexMatrix`] is a thin value type over a row/column-sized
//! `nalgebra::DMatrix<Complex64>`. All binary operations check dimensions and
//! return [`Error::DimensionMismatch`] instead of broadcasting.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
pub(crate) const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            inner: DMatrix::zeros(rows, cols),
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            inner: DMatrix::identity(n, n),
        }
    }

    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, entries: &[Complex64]) -> Result<Self> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(Self {
            inner: DMatrix::from_row_slice(rows, cols, entries),
        })
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::Shape("ragged rows".into()));
        }
        let flat: Vec<Complex64> = rows.iter().flatten().copied().collect();
        Self::from_row_major(rows.len(), cols, &flat)
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn diagonal(values: &[Complex64]) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n);
        for (i, &v) in values.iter().enumerate() {
            m.inner[(i, i)] = v;
        }
        m
    }

    pub fn real_diagonal(values: &[f64]) -> Self {
        let values: Vec<Complex64> = values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::diagonal(&values)
    }

    /// `|ψ⟩⟨ψ|` for an unnormalized column vector `psi`.
    pub fn outer(psi: &[Complex64]) -> Self {
        let n = psi.len();
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m.inner[(i, j)] = psi[i] * psi[j].conj();
            }
        }
        m
    }

    /// `|i⟩⟨j|` in dimension `n`.
    pub fn unit(n: usize, i: usize, j: usize) -> Self {
        let mut m = Self::zeros(n, n);
        m.inner[(i, j)] = ONE;
        m
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        self.rows()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.inner[(i, j)] = value;
    }

    pub fn row_major(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.inner[(i, j)]);
            }
        }
        out
    }

    pub fn as_nalgebra(&self) -> &DMatrix<Complex64> {
        &self.inner
    }

    pub fn from_nalgebra(inner: DMatrix<Complex64>) -> Self {
        Self { inner }
    }

    pub fn dagger(&self) -> Self {
        Self {
            inner: self.inner.adjoint(),
        }
    }

    pub fn trace(&self) -> Complex64 {
        self.inner.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            inner: &self.inner * Complex64::new(s, 0.0),
        }
    }

    pub fn scale_complex(&self, s: Complex64) -> Self {
        Self { inner: &self.inner * s }
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        if self.rows() != other.rows() || self.cols() != other.cols() {
            return Err(Error::DimensionMismatch {
                left: (self.rows(), self.cols()),
                right: (other.rows(), other.cols()),
            });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            inner: &self.inner + &other.inner,
        })
    }

    pub fn try_sub(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        Ok(Self {
            inner: &self.inner - &other.inner,
        })
    }

    pub fn try_mul(&self, other: &Self) -> Result<Self> {
        if self.cols() != other.rows() {
            return Err(Error::DimensionMismatch {
                left: (self.rows(), self.cols()),
                right: (other.rows(), other.cols()),
            });
        }
        Ok(Self {
            inner: &self.inner * &other.inner,
        })
    }

    /// `[a, b] = ab − ba`.
    pub fn commutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_sub(&other.try_mul(self)?)
    }

    /// `{a, b} = ab + ba`.
    pub fn anticommutator(&self, other: &Self) -> Result<Self> {
        self.try_mul(other)?.try_add(&other.try_mul(self)?)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            inner: self.inner.kronecker(&other.inner),
        }
    }

    /// `(m + m†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self {
            inner: (&self.inner + self.inner.adjoint()) * Complex64::new(0.5, 0.0),
        }
    }

    /// Largest entrywise modulus of `m − m†`.
    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.rows().min(self.cols());
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                let d = (self.inner[(i, j)] - self.inner[(j, i)].conj()).norm();
                worst = worst.max(d);
            }
        }
        if !self.is_square() {
            return f64::INFINITY;
        }
        worst
    }

    /// Frobenius (Hilbert–Schmidt) norm.
    pub fn hs_norm(&self) -> f64 {
        self.inner.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.inner.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Eigenvalues (ascending) of the Hermitian part of a square matrix.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let h = self.hermitian_part().inner;
        let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        vals.sort_by(f64::total_cmp);
        vals
    }

    /// Eigen-decomposition `(values, vectors)` of the Hermitian part; columns
    /// of `vectors` are orthonormal eigenvectors.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, ComplexMatrix) {
        let eig = self.hermitian_part().inner.symmetric_eigen();
        let values = eig.eigenvalues.iter().copied().collect();
        (
            values,
            Self {
                inner: eig.eigenvectors,
            },
        )
    }

    /// `exp(−i h t)` for Hermitian `h`, via eigen-decomposition.
    pub fn unitary_propagator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
        if !h.is_square() {
            return Err(Error::Shape("propagator needs a square Hamiltonian".into()));
        }
        let (values, vectors) = h.hermitian_eigen();
        let phases: Vec<Complex64> = values.iter().map(|&e| (-I * e * t).exp()).collect();
        vectors.try_mul(&Self::diagonal(&phases))?.try_mul(&vectors.dagger())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }

    /// Largest entrywise deviation `max|a − b|`.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        Ok(self.try_sub(other)?.max_abs())
    }
}

/// Hilbert–Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Complex64> {
    if !a.is_square() || !b.is_square() {
        return Err(Error::Shape("hs_inner expects square matrices".into()));
    }
    a.same_shape(b)?;
    Ok(a.inner.iter().zip(b.inner.iter()).map(|(x, y)| x.conj() * y).sum())
}

/// Real part of `Tr(a b)` for Hermitian `a`, `b`; this is the real HS product.
pub(crate) fn real_inner(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    a.inner
        .iter()
        .zip(b.inner.iter())
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix {}x{} [", self.rows(), self.cols())?;
        for i in 0..self.rows() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for j in 0..self.cols() {
                let z = self.inner[(i, j)];
                write!(f, "{}{:+.6}{:+.6}i", if j > 0 { ", " } else { "" }, z.re, z.im)?;
            }
        }
        write!(f, "]")
    }
}

// Operator impls panic on shape mismatch; fallible callers use try_*.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        self.try_add(rhs).expect("matrix add: dimension mismatch")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        self.try_sub(rhs).expect("matrix sub: dimension mismatch")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        self.try_mul(rhs).expect("matrix mul: dimension mismatch")
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

/// Pauli matrices and qubit ladder operators in the `|0⟩ = (1, 0)ᵀ` basis.
pub mod pauli {
    use super::*;

    pub fn x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    pub fn y() -> ComplexMatrix {
        ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap()
    }

    pub fn z() -> ComplexMatrix {
        ComplexMatrix::real_diagonal(&[1.0, -1.0])
    }

    /// `σ₋ = (σx − iσy)/2 = |1⟩⟨0|`; drives the Bloch vector to `r_z = −1`.
    pub fn sigma_minus() -> ComplexMatrix {
        ComplexMatrix::unit(2, 1, 0)
    }

    /// `σ₊ = |0⟩⟨1|`
    pub fn sigma_plus() -> ComplexMatrix {
        ComplexMatrix::unit(2, 0, 1)
    }
}

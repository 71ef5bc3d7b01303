//! Validated density matrices, purity, and the partial trace.

use num_complex::Complex64;

use crate::error::{Error, Result, ValidationError};
use crate::matrix::{real_inner, ComplexMatrix, ZERO};

/// Default tolerance for [`validate_density`].
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// A Hermitian, unit-trace, positive-semidefinite matrix, checked at
/// construction against the stored tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    tol: f64,
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        validate_density(matrix, DEFAULT_TOLERANCE)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.matrix.get(i, j)
    }

    /// `|i⟩⟨i|` in dimension `n`.
    pub fn basis(n: usize, i: usize) -> Self {
        Self {
            matrix: ComplexMatrix::unit(n, i, i),
            tol: DEFAULT_TOLERANCE,
        }
    }

    /// `I/n`.
    pub fn maximally_mixed(n: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(n).scale(1.0 / n as f64),
            tol: DEFAULT_TOLERANCE,
        }
    }

    /// `|ψ⟩⟨ψ|` after normalizing `psi`.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("zero state vector".into()));
        }
        let psi: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        validate_density(ComplexMatrix::outer(&psi), DEFAULT_TOLERANCE)
    }

    /// Qubit state `½(I + r·σ)`.
    pub fn from_bloch(r: [f64; 3]) -> Result<Self> {
        let [x, y, z] = r;
        let m = ComplexMatrix::from_rows(&[
            vec![Complex64::new((1.0 + z) / 2.0, 0.0), Complex64::new(x / 2.0, -y / 2.0)],
            vec![Complex64::new(x / 2.0, y / 2.0), Complex64::new((1.0 - z) / 2.0, 0.0)],
        ])?;
        validate_density(m, DEFAULT_TOLERANCE)
    }

    /// Qubit Bloch vector `(Tr ρσx, Tr ρσy, Tr ρσz)`.
    pub fn bloch_vector(&self) -> Option<[f64; 3]> {
        if self.dim() != 2 {
            return None;
        }
        let off = self.get(1, 0);
        Some([2.0 * off.re, 2.0 * off.im, (self.get(0, 0) - self.get(1, 1)).re])
    }

    pub(crate) fn from_trusted(matrix: ComplexMatrix, tol: f64) -> Self {
        Self { matrix, tol }
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix {
            matrix: self.matrix.kron(&other.matrix),
            tol: self.tol.max(other.tol),
        }
    }
}

/// Checks the three density-matrix invariants at tolerance `tol`.
pub fn validate_density(m: ComplexMatrix, tol: f64) -> Result<DensityMatrix> {
    if !m.is_square() {
        return Err(ValidationError::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        }
        .into());
    }
    if m.row_major().iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Numeric("non-finite matrix entry".into()));
    }
    let defect = m.hermiticity_defect();
    if defect > tol {
        return Err(ValidationError::NotHermitian { defect }.into());
    }
    let deviation = (m.trace() - Complex64::new(1.0, 0.0)).norm();
    if deviation > tol {
        return Err(ValidationError::TraceNotOne { deviation }.into());
    }
    let min_eigenvalue = m.hermitian_eigenvalues()[0];
    if min_eigenvalue < -tol {
        return Err(ValidationError::NotPositive { min_eigenvalue }.into());
    }
    Ok(DensityMatrix { matrix: m, tol })
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    real_inner(rho.matrix(), rho.matrix())
}

/// Which factor of a bipartite system to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Reduced state of a bipartite `ρ_AB` on `C^dA ⊗ C^dB`.
pub fn partial_trace(rho_ab: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho_ab.matrix(), dims, keep)?;
    Ok(DensityMatrix::from_trusted(m, rho_ab.tolerance()))
}

/// Partial trace of an arbitrary operator; also used on derivatives.
pub fn partial_trace_matrix(m: &ComplexMatrix, dims: (usize, usize), keep: Subsystem) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if da == 0 || db == 0 || !m.is_square() || da * db != m.dim() {
        return Err(Error::Shape(format!(
            "cannot factor a {}x{} operator as {da}x{db}",
            m.rows(),
            m.cols()
        )));
    }
    let out = match keep {
        Subsystem::A => {
            let mut out = ComplexMatrix::zeros(da, da);
            for i in 0..da {
                for j in 0..da {
                    let mut acc = ZERO;
                    for k in 0..db {
                        acc += m.get(i * db + k, j * db + k);
                    }
                    out.set(i, j, acc);
                }
            }
            out
        }
        Subsystem::B => {
            let mut out = ComplexMatrix::zeros(db, db);
            for i in 0..db {
                for j in 0..db {
                    let mut acc = ZERO;
                    for k in 0..da {
                        acc += m.get(k * db + i, k * db + j);
                    }
                    out.set(i, j, acc);
                }
            }
            out
        }
    };
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ONE;

    #[test]
    fn purity_examples() {
        assert!((purity(&DensityMatrix::basis(2, 0)) - 1.0).abs() < 1e-15);
        assert!((purity(&DensityMatrix::maximally_mixed(2)) - 0.5).abs() < 1e-15);
        let rho = DensityMatrix::new(ComplexMatrix::real_diagonal(&[0.7, 0.3])).unwrap();
        assert!((purity(&rho) - 0.58).abs() < 1e-15);
    }

    #[test]
    fn validation_examples() {
        assert!(validate_density(ComplexMatrix::real_diagonal(&[0.5, 0.5]), 1e-9).is_ok());
        match validate_density(ComplexMatrix::real_diagonal(&[0.5, 0.6]), 1e-9) {
            Err(Error::Validation(ValidationError::TraceNotOne { deviation })) => {
                assert!((deviation - 0.1).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        match validate_density(ComplexMatrix::real_diagonal(&[1.2, -0.2]), 1e-9) {
            Err(Error::Validation(ValidationError::NotPositive { min_eigenvalue })) => {
                assert!((min_eigenvalue + 0.2).abs() < 1e-12)
            }
            other => panic!("unexpected {other:?}"),
        }
        let skew = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]).unwrap();
        assert!(matches!(
            validate_density(skew, 1e-9),
            Err(Error::Validation(ValidationError::NotHermitian { .. }))
        ));
        let stored = validate_density(ComplexMatrix::real_diagonal(&[0.5, 0.5]), 1e-6).unwrap();
        assert_eq!(stored.tolerance(), 1e-6);
    }

    #[test]
    fn partial_trace_of_product_state() {
        let rho = DensityMatrix::new(ComplexMatrix::real_diagonal(&[0.7, 0.3])).unwrap();
        let sigma = DensityMatrix::from_bloch([0.3, -0.2, 0.5]).unwrap();
        let ab = rho.tensor(&sigma);
        let a = partial_trace(&ab, (2, 2), Subsystem::A).unwrap();
        let b = partial_trace(&ab, (2, 2), Subsystem::B).unwrap();
        assert!(a.matrix().max_abs_diff(rho.matrix()).unwrap() < 1e-15);
        assert!(b.matrix().max_abs_diff(sigma.matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_of_bell_state_is_maximally_mixed() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = DensityMatrix::pure(&[ONE * s, ZERO, ZERO, ONE * s]).unwrap();
        let a = partial_trace(&bell, (2, 2), Subsystem::A).unwrap();
        assert!(
            a.matrix()
                .max_abs_diff(DensityMatrix::maximally_mixed(2).matrix())
                .unwrap()
                < 1e-15
        );
    }

    #[test]
    fn partial_trace_keeps_b_of_basis_state() {
        // |01⟩ = |0⟩_A ⊗ |1⟩_B
        let s = DensityMatrix::basis(4, 1);
        let b = partial_trace(&s, (2, 2), Subsystem::B).unwrap();
        assert!(b.matrix().max_abs_diff(DensityMatrix::basis(2, 1).matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_factorization() {
        let s = DensityMatrix::maximally_mixed(6);
        assert!(matches!(partial_trace(&s, (4, 2), Subsystem::A), Err(Error::Shape(_))));
        assert!(partial_trace(&s, (2, 3), Subsystem::B).is_ok());
    }

    #[test]
    fn bloch_round_trip() {
        let r = [0.1, -0.4, 0.6];
        let rho = DensityMatrix::from_bloch(r).unwrap();
        let back = rho.bloch_vector().unwrap();
        for k in 0..3 {
            assert!((back[k] - r[k]).abs() < 1e-15);
        }
    }
}

//! Seeded random states and Hamiltonians.
//!
//! Mixed states come from the Hilbert–Schmidt ensemble `GG†/Tr(GG†)` with
//! `G` a square matrix of independent standard complex Gaussians. When a
//! purity target is requested, a Haar-random pure state is mixed with `I/N`
//! and the mixing weight is found by bisection.
//!
//! Parallel callers derive per-task seeds with [`RngSeed::split`].

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{purity, validate_density, DensityMatrix, DEFAULT_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Seed of the `i`-th parallel task: `base + i`.
    pub fn split(self, i: u64) -> RngSeed {
        RngSeed(self.0.wrapping_add(i))
    }

    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }
}

const PURITY_TOL: f64 = 1e-6;

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

pub fn random_density(dim: usize, purity_target: Option<f64>, seed: RngSeed) -> Result<DensityMatrix> {
    sample_density(&mut seed.rng(), dim, purity_target)
}

pub fn random_hamiltonian(dim: usize, diagonal_only: bool, seed: RngSeed) -> Result<ComplexMatrix> {
    sample_hamiltonian(&mut seed.rng(), dim, diagonal_only)
}

pub fn sample_density<R: Rng + ?Sized>(rng: &mut R, dim: usize, purity_target: Option<f64>) -> Result<DensityMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    let n = dim as f64;
    let Some(target) = purity_target else {
        let entries: Vec<Complex64> = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
        let g = ComplexMatrix::from_row_major(dim, dim, &entries)?;
        let ggd = g.try_mul(&g.dagger())?;
        let tr = ggd.trace().re;
        return validate_density(ggd.scale(1.0 / tr).hermitian_part(), DEFAULT_TOLERANCE);
    };
    if !(target.is_finite() && target >= 1.0 / n - 1e-12 && target <= 1.0 + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "purity target {target} outside [1/{dim}, 1]"
        )));
    }
    let psi: Vec<Complex64> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let pure = DensityMatrix::pure(&psi)?;
    let mixed = DensityMatrix::maximally_mixed(dim);
    let blend = |w: f64| {
        pure.matrix()
            .scale(w)
            .try_add(&mixed.matrix().scale(1.0 - w))
            .map(|m| m.hermitian_part())
    };
    // purity(w) = 1/N + w²(1 − 1/N) is increasing on [0, 1].
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut state = blend(1.0)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        state = blend(mid)?;
        let p = purity(&DensityMatrix::from_trusted(state.clone(), DEFAULT_TOLERANCE));
        if (p - target).abs() <= 1e-13 {
            break;
        }
        if p < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    let rho = validate_density(state, DEFAULT_TOLERANCE)?;
    let achieved = purity(&rho);
    if (achieved - target).abs() > PURITY_TOL {
        return Err(Error::Numeric(format!(
            "purity bisection reached {achieved}, target {target}"
        )));
    }
    Ok(rho)
}

/// Diagonal entries are uniform on `[0, 2π]`; the dense option is `(A + A†)/2`
/// with standard complex Gaussian `A`.
pub fn sample_hamiltonian<R: Rng + ?Sized>(rng: &mut R, dim: usize, diagonal_only: bool) -> Result<ComplexMatrix> {
    if dim < 2 {
        return Err(Error::InvalidArgument(format!("dimension {dim} < 2")));
    }
    if diagonal_only {
        let diag: Vec<f64> = (0..dim)
            .map(|_| rng.random_range(0.0..=std::f64::consts::TAU))
            .collect();
        return Ok(ComplexMatrix::real_diagonal(&diag));
    }
    let entries: Vec<Complex64> = (0..dim * dim).map(|_| complex_gaussian(rng)).collect();
    Ok(ComplexMatrix::from_row_major(dim, dim, &entries)?.hermitian_part())
}

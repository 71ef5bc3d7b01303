//! State distances and instantaneous speeds.
//!
//! Every density matrix `ρ` maps to the unit Hilbert–Schmidt vector
//! `P = ρ/√Trρ²`. The distance `D(ρ‖σ) = arccos⟨P_ρ, P_σ⟩` is the great-circle
//! angle between those vectors, so it is a metric bounded by `π/2` (all
//! overlaps of density matrices are non-negative). Its line element gives the
//! speed
//!
//! ```text
//! v_D = √(Trρ̇² Trρ² − (Trρρ̇)²) / Trρ²  = √⟨Ṗ, Ṗ⟩ .
//! ```
//!
//! The Euclidean distance `E = √Tr(ρ−σ)²` and `Φ = √2 arccos √⟨P_ρ, P_σ⟩`
//! are provided for comparison.

use crate::error::{Error, Result};
use crate::matrix::{real_inner, ComplexMatrix};
use crate::state::{purity, DensityMatrix};

/// Largest overshoot of a cosine past ±1 that is treated as rounding.
pub const ARCCOS_CLAMP: f64 = 1e-10;

/// Tolerance on `|Tr ρ̇|` accepted by the speed functions.
pub const TRACELESS_TOL: f64 = 1e-9;

/// `ρ/√Trρ²`: a unit vector under the Hilbert–Schmidt inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedState {
    matrix: ComplexMatrix,
}

impl NormalizedState {
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// `⟨P, Q⟩`, real for Hermitian arguments.
    pub fn overlap(&self, other: &NormalizedState) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(real_inner(&self.matrix, &other.matrix))
    }

    /// Re-normalizes to unit HS norm.
    pub fn renormalized(&self) -> NormalizedState {
        NormalizedState {
            matrix: self.matrix.scale(1.0 / self.matrix.hs_norm()),
        }
    }
}

/// One sample of the D- and E-metric speeds along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SpeedSample {
    pub time: f64,
    pub v_d: f64,
    pub v_e: f64,
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            left: (a, a),
            right: (b, b),
        });
    }
    Ok(())
}

pub fn normalize(rho: &DensityMatrix) -> NormalizedState {
    NormalizedState {
        matrix: rho.matrix().scale(1.0 / purity(rho).sqrt()),
    }
}

/// `Tr(ρσ)/(√Trρ² √Trσ²)`.
pub fn fidelity_gm(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    let num = real_inner(rho.matrix(), sigma.matrix());
    Ok(num / (purity(rho) * purity(sigma)).sqrt())
}

/// Clamps a cosine into `[-1, 1]`, rejecting overshoots beyond rounding.
fn clamp_cosine(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Numeric(format!("non-finite cosine {x}")));
    }
    if !(-1.0 - ARCCOS_CLAMP..=1.0 + ARCCOS_CLAMP).contains(&x) {
        return Err(Error::Numeric(format!("cosine {x} outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0))
}

/// Angle between two unit vectors with the given overlap and chord length.
/// Near-parallel vectors use `2 asin(chord/2)`, which stays accurate where
/// `arccos` loses half the digits.
fn unit_angle(overlap: f64, chord: impl FnOnce() -> f64) -> Result<f64> {
    let c = clamp_cosine(overlap)?;
    if c > 0.9 {
        Ok(2.0 * (0.5 * chord()).min(1.0).asin())
    } else {
        Ok(c.acos())
    }
}

/// `D(ρ‖σ) = arccos F_GM(ρ, σ) ∈ [0, π/2]`.
pub fn distance_d(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = fidelity_gm(rho, sigma)?;
    unit_angle(f, || {
        let p = normalize(rho);
        let q = normalize(sigma);
        p.matrix.try_sub(&q.matrix).map(|d| d.hs_norm()).unwrap_or(f64::NAN)
    })
}

/// `E(ρ‖σ) = √Tr(ρ−σ)²`.
pub fn distance_e(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    Ok(rho.matrix().try_sub(sigma.matrix())?.hs_norm())
}

/// `Φ(ρ‖σ) = √2 arccos √⟨P_ρ, P_σ⟩`.
pub fn distance_phi(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let f = clamp_cosine(fidelity_gm(rho, sigma)?)?;
    if f < 0.0 {
        // overlaps of PSD operators are non-negative; only rounding lands here
        if f < -ARCCOS_CLAMP {
            return Err(Error::Numeric(format!("negative overlap {f}")));
        }
    }
    let root = f.max(0.0).sqrt();
    // for a cosine cos θ = √f:  sin(θ/2)·2 = √(2 − 2√f) is the chord
    let angle = unit_angle(root, || (2.0 - 2.0 * root).max(0.0).sqrt())?;
    Ok(std::f64::consts::SQRT_2 * angle)
}

fn check_derivative(rho_dot: &ComplexMatrix) -> Result<()> {
    let tr = rho_dot.trace().norm();
    if tr > TRACELESS_TOL {
        return Err(Error::NotTraceless(tr));
    }
    Ok(())
}

/// Speed in the D metric for state `rho` moving with derivative `rho_dot`.
pub fn speed_d(rho: &DensityMatrix, rho_dot: &ComplexMatrix) -> Result<f64> {
    check_dims(rho.dim(), rho_dot.dim())?;
    check_derivative(rho_dot)?;
    let pr = purity(rho);
    let dd = real_inner(rho_dot, rho_dot);
    let rd = real_inner(rho.matrix(), rho_dot);
    // Trρ̇²Trρ² − (Trρρ̇)² ≥ 0 by Cauchy–Schwarz; clip rounding
    let num = (dd * pr - rd * rd).max(0.0);
    Ok(num.sqrt() / pr)
}

/// Euclidean speed `√Trρ̇²`.
pub fn speed_e(rho_dot: &ComplexMatrix) -> Result<f64> {
    check_derivative(rho_dot)?;
    Ok(real_inner(rho_dot, rho_dot).sqrt())
}

pub fn speed_sample(time: f64, rho: &DensityMatrix, rho_dot: &ComplexMatrix) -> Result<SpeedSample> {
    Ok(SpeedSample {
        time,
        v_d: speed_d(rho, rho_dot)?,
        v_e: speed_e(rho_dot)?,
    })
}

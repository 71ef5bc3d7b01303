//! Generalized amplitude damping of an `N`-level system into `|0⟩`.
//!
//! With jump operators `|0⟩⟨k|` (`k ≥ 1`) at a common rate `γ_t`, a diagonal
//! initial state `diag(λ₀, λ₁, …)` evolves as
//!
//! ```text
//! ρ_t = (1 − b q_t)|0⟩⟨0| + Σ_{k≥1} λ_k q_t |k⟩⟨k|,   b = Σ_{k≥1} λ_k,
//! ```
//!
//! so `ρ̇_t = q̇_t (Σ_{k≥1} λ_k|k⟩⟨k| − b|0⟩⟨0|)` points along a fixed traceless
//! direction. Lamb shifts commute with diagonal states and leave the solution
//! unchanged; they only enter the generator.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{validate_density, DensityMatrix, DEFAULT_TOLERANCE};

use super::{lindblad_rhs, sample_closed_form, DecayLaw, Trajectory};

/// Lamb shift `s_t^k` as a function of `(k, t)`.
pub type LambShift = Arc<dyn Fn(usize, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct GADParams {
    excited: Vec<f64>,
    law: DecayLaw,
    lamb_shift: Option<LambShift>,
}

impl fmt::Debug for GADParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GADParams")
            .field("excited", &self.excited)
            .field("law", &self.law)
            .field("lamb_shift", &self.lamb_shift.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl GADParams {
    /// `excited` holds `λ₁ … λ_{N−1}`; `λ₀ = 1 − Σ λ_k`.
    pub fn new(excited: Vec<f64>, law: DecayLaw) -> Result<Self> {
        if excited.is_empty() {
            return Err(Error::InvalidArgument("need at least one excited level".into()));
        }
        if excited.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::InvalidArgument("populations must be non-negative".into()));
        }
        let b: f64 = excited.iter().sum();
        if b > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("excited populations sum to {b} > 1")));
        }
        Ok(Self {
            excited,
            law,
            lamb_shift: None,
        })
    }

    pub fn with_lamb_shift(mut self, shift: LambShift) -> Self {
        self.lamb_shift = Some(shift);
        self
    }

    pub fn dim(&self) -> usize {
        self.excited.len() + 1
    }

    pub fn law(&self) -> &DecayLaw {
        &self.law
    }

    pub fn excited(&self) -> &[f64] {
        &self.excited
    }

    /// `λ₀, λ₁, …`.
    pub fn populations(&self) -> Vec<f64> {
        let mut p = Vec::with_capacity(self.dim());
        p.push(1.0 - self.excited_weight());
        p.extend_from_slice(&self.excited);
        p
    }

    /// `b = Σ_{k≥1} λ_k`.
    pub fn excited_weight(&self) -> f64 {
        self.excited.iter().sum()
    }

    /// Traceless direction `Σ_{k≥1} λ_k|k⟩⟨k| − b|0⟩⟨0|`.
    fn direction(&self) -> ComplexMatrix {
        let mut d = vec![-self.excited_weight()];
        d.extend_from_slice(&self.excited);
        ComplexMatrix::real_diagonal(&d)
    }

    fn survival_checked(&self, t: f64) -> Result<f64> {
        let q = self.law.survival(t)?;
        if self.law.is_markovian() {
            if !(q > 0.0 && q <= 1.0 + 1e-15) {
                return Err(Error::Numeric(format!(
                    "survival factor q = {q} outside (0, 1] at t = {t}"
                )));
            }
        } else if !(q >= 0.0 && q.is_finite()) {
            return Err(Error::Numeric(format!("survival factor q = {q} invalid at t = {t}")));
        }
        Ok(q)
    }
}

pub fn gad_solution(params: &GADParams, t: f64) -> Result<DensityMatrix> {
    let q = params.survival_checked(t)?;
    let mut diag = vec![1.0 - params.excited_weight() * q];
    diag.extend(params.excited.iter().map(|&l| l * q));
    validate_density(ComplexMatrix::real_diagonal(&diag), DEFAULT_TOLERANCE)
}

pub fn gad_derivative(params: &GADParams, t: f64) -> Result<ComplexMatrix> {
    Ok(params.direction().scale(params.law.survival_rate(t)?))
}

/// Master-equation right-hand side with jumps `|0⟩⟨k|` at rate `γ_t` and
/// Hamiltonian `Σ_k s_t^k/2 |k⟩⟨k|`.
pub fn gad_generator(params: &GADParams) -> impl Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix> + '_ {
    let n = params.dim();
    let jumps: Vec<ComplexMatrix> = (1..n).map(|k| ComplexMatrix::unit(n, 0, k)).collect();
    move |t, rho| {
        let rate = params.law.rate(t)?;
        let hamiltonian = params.lamb_shift.as_ref().map(|s| {
            let d: Vec<f64> = (0..n).map(|k| if k == 0 { 0.0 } else { 0.5 * s(k, t) }).collect();
            ComplexMatrix::real_diagonal(&d)
        });
        let pairs: Vec<(f64, &ComplexMatrix)> = jumps.iter().map(|l| (rate, l)).collect();
        lindblad_rhs(hamiltonian.as_ref(), &pairs, rho)
    }
}

pub fn gad_trajectory(params: &GADParams, tau: f64, grid: usize) -> Result<Trajectory> {
    sample_closed_form("gad", tau, grid, |t| {
        Ok((gad_solution(params, t)?.into_matrix(), gad_derivative(params, t)?))
    })
}

//! Pure dephasing with a level-independent decoherence exponent.
//!
//! Populations are frozen and every coherence is multiplied by
//! `e^{−γ_t} = q_t` from the decay law, with `γ₀ = 0`.

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{validate_density, DensityMatrix, DEFAULT_TOLERANCE};

use super::{sample_closed_form, DecayLaw, Trajectory};

#[derive(Debug, Clone)]
pub struct DephasingParams {
    pub rho0: DensityMatrix,
    pub law: DecayLaw,
}

fn off_diagonal(m: &ComplexMatrix) -> ComplexMatrix {
    let mut out = m.clone();
    for i in 0..m.dim() {
        out.set(i, i, num_complex::Complex64::new(0.0, 0.0));
    }
    out
}

fn diagonal(m: &ComplexMatrix) -> ComplexMatrix {
    m.try_sub(&off_diagonal(m)).expect("same shape")
}

pub fn dephasing_solution(params: &DephasingParams, t: f64) -> Result<DensityMatrix> {
    let q = params.law.survival(t)?;
    if !q.is_finite() || q < 0.0 {
        return Err(Error::Numeric(format!("coherence factor {q} at t = {t}")));
    }
    let m = params.rho0.matrix();
    let rho = diagonal(m).try_add(&off_diagonal(m).scale(q))?;
    validate_density(rho, DEFAULT_TOLERANCE.max(params.rho0.tolerance()))
}

pub fn dephasing_derivative(params: &DephasingParams, t: f64) -> Result<ComplexMatrix> {
    Ok(off_diagonal(params.rho0.matrix()).scale(params.law.survival_rate(t)?))
}

/// `ρ̇ = −γ̇_t · offdiag(ρ)`.
pub fn dephasing_generator(law: &DecayLaw) -> impl Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix> + '_ {
    move |t, rho| Ok(off_diagonal(rho).scale(-law.rate(t)?))
}

pub fn dephasing_trajectory(params: &DephasingParams, tau: f64, grid: usize) -> Result<Trajectory> {
    sample_closed_form("dephasing", tau, grid, |t| {
        Ok((
            dephasing_solution(params, t)?.into_matrix(),
            dephasing_derivative(params, t)?,
        ))
    })
}

/// `R = √(Σ_{j≠k}|ρ_jk|² / Σ_i ρ_ii²)`.
pub fn coherence_ratio(rho: &DensityMatrix) -> f64 {
    let m = rho.matrix();
    let off: f64 = off_diagonal(m).row_major().iter().map(|z| z.norm_sqr()).sum();
    let diag: f64 = (0..m.dim()).map(|i| m.get(i, i).norm_sqr()).sum();
    (off / diag).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::integrate;
    use num_complex::Complex64;

    fn plus() -> DensityMatrix {
        DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap()
    }

    #[test]
    fn starts_at_initial_state() {
        let p = DephasingParams {
            rho0: plus(),
            law: DecayLaw::Constant(0.7),
        };
        let rho = dephasing_solution(&p, 0.0).unwrap();
        assert!(rho.matrix().max_abs_diff(plus().matrix()).unwrap() < 1e-15);
    }

    #[test]
    fn full_decoherence_leaves_populations() {
        let rho0 = DensityMatrix::from_bloch([0.3, -0.4, 0.5]).unwrap();
        let p = DephasingParams {
            rho0: rho0.clone(),
            law: DecayLaw::Constant(1.0),
        };
        let rho = dephasing_solution(&p, 800.0).unwrap();
        assert!(rho.matrix().max_abs_diff(&diagonal(rho0.matrix())).unwrap() < 1e-15);
    }

    #[test]
    fn ln2_halves_coherence() {
        let p = DephasingParams {
            rho0: plus(),
            law: DecayLaw::Constant(std::f64::consts::LN_2),
        };
        let rho = dephasing_solution(&p, 1.0).unwrap();
        let expect = ComplexMatrix::from_real_rows(&[&[0.5, 0.25], &[0.25, 0.5]]).unwrap();
        assert!(rho.matrix().max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn coherence_ratio_of_plus_is_one() {
        assert!((coherence_ratio(&plus()) - 1.0).abs() < 1e-15);
        assert_eq!(coherence_ratio(&DensityMatrix::basis(3, 1)), 0.0);
    }

    #[test]
    fn integrator_matches_closed_form_in_qutrit() {
        let psi = [
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.48),
            Complex64::new(0.64, 0.0),
        ];
        let rho0 = DensityMatrix::pure(&psi).unwrap();
        let p = DephasingParams {
            rho0: rho0.clone(),
            law: DecayLaw::Constant(0.8),
        };
        let traj = integrate(dephasing_generator(&p.law), &rho0, 1.5, 1e-3, "dephasing").unwrap();
        for (t, s) in traj.times().iter().zip(traj.states()) {
            let exact = dephasing_solution(&p, *t).unwrap();
            assert!(s.matrix().max_abs_diff(exact.matrix()).unwrap() < 1e-8);
        }
    }
}

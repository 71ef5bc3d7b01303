//! Driven, damped qubit with a tilted Hamiltonian.
//!
//! `H = Ω_L/2 (cos θ σ_z + sin θ σ_x)` and a single jump `Σ₋ = U σ₋ U†` at a
//! constant rate `γ`, where `U` rotates `ẑ` onto `n = (sin θ, 0, cos θ)`. The
//! Bloch vector precesses about `n` at frequency `Ω_L`; its transverse part
//! decays as `e^{−γt/2}` and its longitudinal part relaxes to `−1` as
//! `e^{−γt}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{pauli, ComplexMatrix};
use crate::state::{validate_density, DensityMatrix, DEFAULT_TOLERANCE};

use super::{lindblad_rhs, sample_closed_form, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixBParams {
    pub theta: f64,
    pub omega_l: f64,
    pub gamma: f64,
    pub r0: [f64; 3],
}

impl AppendixBParams {
    pub fn new(theta: f64, omega_l: f64, gamma: f64, r0: [f64; 3]) -> Result<Self> {
        let norm = r0.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + 1e-12 {
            return Err(Error::InvalidArgument(format!("|r(0)| = {norm} exceeds 1")));
        }
        if !(gamma >= 0.0 && gamma.is_finite()) {
            return Err(Error::InvalidArgument(format!("gamma = {gamma} must be non-negative")));
        }
        if !(theta.is_finite() && omega_l.is_finite()) {
            return Err(Error::InvalidArgument("theta and omega_l must be finite".into()));
        }
        Ok(Self {
            theta,
            omega_l,
            gamma,
            r0,
        })
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        pauli::z()
            .scale(self.theta.cos())
            .try_add(&pauli::x().scale(self.theta.sin()))
            .expect("2x2")
            .scale(0.5 * self.omega_l)
    }

    /// `U σ₋ U†`.
    pub fn jump(&self) -> ComplexMatrix {
        let (c, s) = ((0.5 * self.theta).cos(), (0.5 * self.theta).sin());
        let u = ComplexMatrix::from_real_rows(&[&[c, -s], &[s, c]]).expect("2x2");
        u.try_mul(&pauli::sigma_minus())
            .and_then(|m| m.try_mul(&u.dagger()))
            .expect("2x2")
    }

    pub fn bloch_at(&self, t: f64) -> [f64; 3] {
        let (s, c) = self.theta.sin_cos();
        let (sw, cw) = (self.omega_l * t).sin_cos();
        let h = (-0.5 * self.gamma * t).exp();
        let e = (-self.gamma * t).exp();
        let [x0, y0, z0] = self.r0;
        let rx = h * ((s * s * h + c * c * cw) * x0 - c * sw * y0 + s * c * (h - cw) * z0) + s * (e - 1.0);
        let ry = h * (c * sw * x0 + cw * y0 - s * sw * z0);
        let rz = h * (s * c * (h - cw) * x0 + s * sw * y0 + (c * c * h + s * s * cw) * z0) + c * (e - 1.0);
        [rx, ry, rz]
    }

    pub fn bloch_rate_at(&self, t: f64) -> [f64; 3] {
        let [x, y, z] = self.bloch_at(t);
        let (s, c) = self.theta.sin_cos();
        let w = self.omega_l;
        let g = self.gamma;
        // precession about n plus relaxation toward −n
        let l = s * x + c * z;
        let (px, pz) = (x - l * s, z - l * c);
        let ld = -g * (l + 1.0);
        [
            -w * c * y - 0.5 * g * px + ld * s,
            w * (c * x - s * z) - 0.5 * g * y,
            w * s * y - 0.5 * g * pz + ld * c,
        ]
    }
}

fn bloch_matrix(r: [f64; 3], with_identity: bool) -> ComplexMatrix {
    let base = if with_identity {
        ComplexMatrix::identity(2)
    } else {
        ComplexMatrix::zeros(2, 2)
    };
    base.try_add(&pauli::x().scale(r[0]))
        .and_then(|m| m.try_add(&pauli::y().scale(r[1])))
        .and_then(|m| m.try_add(&pauli::z().scale(r[2])))
        .expect("2x2")
        .scale(0.5)
}

pub fn appendix_b_solution(params: &AppendixBParams, t: f64) -> Result<DensityMatrix> {
    let r = params.bloch_at(t);
    let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 1.0 + 1e-9 {
        return Err(Error::Numeric(format!("Bloch norm {norm} exceeds 1 at t = {t}")));
    }
    validate_density(bloch_matrix(r, true), DEFAULT_TOLERANCE)
}

pub fn appendix_b_generator(params: &AppendixBParams) -> impl Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix> {
    let h = params.hamiltonian();
    let l = params.jump();
    let gamma = params.gamma;
    move |_, rho| lindblad_rhs(Some(&h), &[(gamma, &l)], rho)
}

pub fn appendix_b_trajectory(params: &AppendixBParams, tau: f64, grid: usize) -> Result<Trajectory> {
    sample_closed_form("appendix-b", tau, grid, |t| {
        Ok((
            appendix_b_solution(params, t)?.into_matrix(),
            bloch_matrix(params.bloch_rate_at(t), false),
        ))
    })
}

//! Qubit coupled to a thermal bath, as a four-operator Kraus channel.
//!
//! ```text
//! K₀ = √c (√(1−p)|0⟩⟨0| + |1⟩⟨1|)      K₁ = √c √p |1⟩⟨0|
//! K₂ = √(1−c)(√(1−p)|1⟩⟨1| + |0⟩⟨0|)  K₃ = √(1−c) √p |0⟩⟨1|
//! ```
//!
//! Acting on `ρ₀` with excited population `ρ₁₁` and coherence `ρ₁₀` (the
//! `|0⟩⟨1|` entry) this gives `ρ₁₁(t) = (c − ρ₁₁)p + ρ₁₁` and coherence
//! `√(1−p) ρ₁₀`. The fixed point is `diag(1−c, c)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::state::{validate_density, DensityMatrix, DEFAULT_TOLERANCE};

use super::{sample_closed_form, Trajectory};

/// Monotone path parameter `p(t)` with `p(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum KrausSchedule {
    /// `p(t) = ln(1 + t/scale)`.
    LogOnePlus { scale: f64 },
    /// `p(t) = rate·t`.
    Linear { rate: f64 },
}

impl Default for KrausSchedule {
    fn default() -> Self {
        KrausSchedule::LogOnePlus { scale: 100.0 }
    }
}

impl KrausSchedule {
    pub fn p(&self, t: f64) -> f64 {
        match *self {
            KrausSchedule::LogOnePlus { scale } => (t / scale).ln_1p(),
            KrausSchedule::Linear { rate } => rate * t,
        }
    }

    pub fn p_dot(&self, t: f64) -> f64 {
        match *self {
            KrausSchedule::LogOnePlus { scale } => 1.0 / (scale + t),
            KrausSchedule::Linear { rate } => rate,
        }
    }

    /// Largest `t` with `p(t) ≤ 1`.
    pub fn horizon(&self) -> f64 {
        match *self {
            KrausSchedule::LogOnePlus { scale } => scale * (std::f64::consts::E - 1.0),
            KrausSchedule::Linear { rate } => 1.0 / rate,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThermalKrausParams {
    pub c: f64,
    pub schedule: KrausSchedule,
    pub rho11: f64,
    pub rho10: Complex64,
}

impl ThermalKrausParams {
    pub fn new(c: f64, schedule: KrausSchedule, rho11: f64, rho10: Complex64) -> Result<Self> {
        if !(0.0..=1.0).contains(&c) {
            return Err(Error::InvalidArgument(format!("c = {c} outside [0, 1]")));
        }
        if !(0.0..=1.0).contains(&rho11) {
            return Err(Error::InvalidArgument(format!("rho11 = {rho11} outside [0, 1]")));
        }
        if rho10.norm_sqr() > rho11 * (1.0 - rho11) + 1e-12 {
            return Err(Error::InvalidArgument("initial state is not positive".into()));
        }
        Ok(Self {
            c,
            schedule,
            rho11,
            rho10,
        })
    }

    /// Pure initial state with real coherence `√(ρ₁₁(1−ρ₁₁))`.
    pub fn pure(c: f64, schedule: KrausSchedule, rho11: f64) -> Result<Self> {
        let coh = (rho11 * (1.0 - rho11)).max(0.0).sqrt();
        Self::new(c, schedule, rho11, Complex64::new(coh, 0.0))
    }

    pub fn initial(&self) -> Result<DensityMatrix> {
        validate_density(self.matrix_at(0.0), DEFAULT_TOLERANCE)
    }

    fn matrix_at(&self, p: f64) -> ComplexMatrix {
        let r11 = (self.c - self.rho11) * p + self.rho11;
        let coh = self.rho10 * (1.0 - p).max(0.0).sqrt();
        ComplexMatrix::from_rows(&[
            vec![Complex64::new(1.0 - r11, 0.0), coh],
            vec![coh.conj(), Complex64::new(r11, 0.0)],
        ])
        .expect("2x2")
    }

    fn p_checked(&self, t: f64) -> Result<f64> {
        let p = self.schedule.p(t);
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("p({t}) = {p} outside [0, 1]")));
        }
        Ok(p)
    }
}

pub fn kraus_operators(c: f64, p: f64) -> Result<[ComplexMatrix; 4]> {
    if !(0.0..=1.0).contains(&c) || !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("(c, p) = ({c}, {p}) outside [0, 1]^2")));
    }
    let (sc, sc1, sp, sp1) = (c.sqrt(), (1.0 - c).sqrt(), p.sqrt(), (1.0 - p).sqrt());
    Ok([
        ComplexMatrix::real_diagonal(&[sc * sp1, sc]),
        ComplexMatrix::unit(2, 1, 0).scale(sc * sp),
        ComplexMatrix::real_diagonal(&[sc1, sc1 * sp1]),
        ComplexMatrix::unit(2, 0, 1).scale(sc1 * sp),
    ])
}

/// `Σ K ρ K†`.
pub fn apply_kraus(ops: &[ComplexMatrix], rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
    for k in ops {
        out = out.try_add(&k.try_mul(rho)?.try_mul(&k.dagger())?)?;
    }
    Ok(out)
}

pub fn kraus_thermal(params: &ThermalKrausParams, t: f64) -> Result<DensityMatrix> {
    let p = params.p_checked(t)?;
    validate_density(params.matrix_at(p), DEFAULT_TOLERANCE)
}

pub fn kraus_thermal_derivative(params: &ThermalKrausParams, t: f64) -> Result<ComplexMatrix> {
    let p = params.p_checked(t)?;
    if p >= 1.0 {
        return Err(Error::Numeric("coherence derivative diverges at p = 1".into()));
    }
    let pd = params.schedule.p_dot(t);
    let r11_dot = (params.c - params.rho11) * pd;
    let coh_dot = params.rho10 * (-0.5 * pd / (1.0 - p).sqrt());
    ComplexMatrix::from_rows(&[
        vec![Complex64::new(-r11_dot, 0.0), coh_dot],
        vec![coh_dot.conj(), Complex64::new(r11_dot, 0.0)],
    ])
}

pub fn kraus_trajectory(params: &ThermalKrausParams, tau: f64, grid: usize) -> Result<Trajectory> {
    if tau > params.schedule.horizon() {
        return Err(Error::InvalidArgument(format!(
            "tau = {tau} beyond the p(t) <= 1 horizon {}",
            params.schedule.horizon()
        )));
    }
    sample_closed_form("thermal-kraus", tau, grid, |t| {
        Ok((
            kraus_thermal(params, t)?.into_matrix(),
            kraus_thermal_derivative(params, t)?,
        ))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn completeness_on_grid() {
        for i in 0..=20 {
            for j in 0..=20 {
                let (c, p) = (i as f64 / 20.0, j as f64 / 20.0);
                let ops = kraus_operators(c, p).unwrap();
                let mut sum = ComplexMatrix::zeros(2, 2);
                for k in &ops {
                    sum = sum.try_add(&k.dagger().try_mul(k).unwrap()).unwrap();
                }
                assert!(sum.max_abs_diff(&ComplexMatrix::identity(2)).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn closed_form_matches_kraus_sum() {
        let params = ThermalKrausParams::new(0.3, KrausSchedule::default(), 0.35, Complex64::new(0.2, -0.3)).unwrap();
        let rho0 = params.initial().unwrap();
        for t in [0.0, 5.0, 40.0, 100.0] {
            let p = params.schedule.p(t);
            let ops = kraus_operators(params.c, p).unwrap();
            let direct = apply_kraus(&ops, rho0.matrix()).unwrap();
            let closed = kraus_thermal(&params, t).unwrap();
            assert!(closed.matrix().max_abs_diff(&direct).unwrap() < 1e-12);
        }
    }

    #[test]
    fn zero_p_is_identity_channel() {
        let params = ThermalKrausParams::pure(0.5, KrausSchedule::default(), 0.2).unwrap();
        let rho = kraus_thermal(&params, 0.0).unwrap();
        assert_eq!(rho, params.initial().unwrap());
    }

    #[test]
    fn full_p_reaches_fixed_point() {
        let schedule = KrausSchedule::Linear { rate: 1.0 };
        let params = ThermalKrausParams::pure(0.3, schedule, 0.8).unwrap();
        let rho = kraus_thermal(&params, 1.0).unwrap();
        let expect = ComplexMatrix::real_diagonal(&[0.7, 0.3]);
        assert!(rho.matrix().max_abs_diff(&expect).unwrap() < 1e-15);
    }

    #[test]
    fn population_arithmetic() {
        let schedule = KrausSchedule::Linear { rate: 1.0 };
        let params = ThermalKrausParams::pure(0.5, schedule, 0.2).unwrap();
        let rho = kraus_thermal(&params, 0.5).unwrap();
        assert!((rho.get(1, 1).re - 0.35).abs() < 1e-15);
    }

    #[test]
    fn p_out_of_range() {
        let schedule = KrausSchedule::Linear { rate: 1.0 };
        let params = ThermalKrausParams::pure(0.5, schedule, 0.2).unwrap();
        assert!(kraus_thermal(&params, 1.5).is_err());
        assert!(kraus_operators(0.5, 1.2).is_err());
        assert!(kraus_trajectory(&params, 2.0, 33).is_err());
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let params = ThermalKrausParams::pure(0.5, KrausSchedule::default(), 0.3).unwrap();
        let h = 1e-4;
        let t = 30.0;
        let fd = kraus_thermal(&params, t + h)
            .unwrap()
            .matrix()
            .try_sub(kraus_thermal(&params, t - h).unwrap().matrix())
            .unwrap()
            .scale(0.5 / h);
        let an = kraus_thermal_derivative(&params, t).unwrap();
        assert!(fd.max_abs_diff(&an).unwrap() < 1e-10);
    }
}

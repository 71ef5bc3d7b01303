//! Serializable descriptions of evolution laws.
//!
//! A [`DynamicsModel`] names one of the built-in dynamics together with its
//! parameters and horizon, and turns into a [`Trajectory`] either through the
//! exact solution or, where a generator exists, through RK4 integration.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bounds::{geodesic_path, BetaLaw};
use crate::dynamics::{
    appendix_b_generator, appendix_b_solution, appendix_b_trajectory, bipartite_sample, dephasing_generator,
    dephasing_trajectory, gad_generator, gad_solution, gad_trajectory, integrate, kraus_trajectory, lindblad_rhs,
    unitary_trajectory, AppendixBParams, DecayLaw, DephasingParams, GADParams, KrausSchedule, NonMarkovRate,
    TabulatedRate, ThermalKrausParams, Trajectory,
};
use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::random::RngSeed;
use crate::state::{validate_density, DensityMatrix, DEFAULT_TOLERANCE};

/// A matrix entry: a real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl From<Entry> for Complex64 {
    fn from(e: Entry) -> Self {
        match e {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

/// Row-major nested list of entries.
pub type MatrixSpec = Vec<Vec<Entry>>;

pub fn matrix_from_spec(spec: &MatrixSpec) -> Result<ComplexMatrix> {
    let rows: Vec<Vec<Complex64>> = spec.iter().map(|r| r.iter().map(|&e| e.into()).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn density_from_spec(spec: &MatrixSpec) -> Result<DensityMatrix> {
    validate_density(matrix_from_spec(spec)?, DEFAULT_TOLERANCE)
}

pub fn spec_from_matrix(m: &ComplexMatrix) -> MatrixSpec {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m.get(i, j);
                    if z.im == 0.0 {
                        Entry::Real(z.re)
                    } else {
                        Entry::Complex([z.re, z.im])
                    }
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DecayLawSpec {
    Constant {
        gamma: f64,
    },
    NonMarkov {
        gamma0: f64,
        lambda: f64,
    },
    /// Two-column CSV `(t, γ_t)`.
    Tabulated {
        path: PathBuf,
    },
}

impl Default for DecayLawSpec {
    fn default() -> Self {
        DecayLawSpec::Constant { gamma: 1.0 }
    }
}

impl DecayLawSpec {
    pub fn build(&self) -> Result<DecayLaw> {
        Ok(match self {
            DecayLawSpec::Constant { gamma } => DecayLaw::Constant(*gamma),
            DecayLawSpec::NonMarkov { gamma0, lambda } => DecayLaw::NonMarkov(NonMarkovRate::new(*gamma0, *lambda)?),
            DecayLawSpec::Tabulated { path } => DecayLaw::Tabulated(TabulatedRate::from_csv(path)?),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BetaSpec {
    #[default]
    Linear,
    Quadratic,
    Sine,
}

impl From<BetaSpec> for BetaLaw {
    fn from(b: BetaSpec) -> Self {
        match b {
            BetaSpec::Linear => BetaLaw::Linear,
            BetaSpec::Quadratic => BetaLaw::Quadratic,
            BetaSpec::Sine => BetaLaw::Sine,
        }
    }
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DynamicsModel {
    /// Amplitude damping into `|0⟩`; `excited` holds `λ₁ … λ_{N−1}`.
    Gad {
        excited: Vec<f64>,
        #[serde(default)]
        law: DecayLawSpec,
        tau: f64,
    },
    Dephasing {
        rho0: MatrixSpec,
        #[serde(default)]
        law: DecayLawSpec,
        tau: f64,
    },
    ThermalKraus {
        c: f64,
        rho11: f64,
        /// `[re, im]` of the `|0⟩⟨1|` entry; defaults to the pure-state value.
        #[serde(default)]
        rho10: Option<[f64; 2]>,
        #[serde(default)]
        schedule: KrausSchedule,
        tau: f64,
    },
    AppendixB {
        theta: f64,
        omega_l: f64,
        gamma: f64,
        r0: [f64; 3],
        tau: f64,
    },
    Bipartite {
        seed: u64,
        #[serde(default = "default_true")]
        diagonal_h: bool,
        tau: f64,
    },
    Geodesic {
        rho0: MatrixSpec,
        rho_tau: MatrixSpec,
        #[serde(default)]
        beta: BetaSpec,
        tau: f64,
    },
    Unitary {
        rho0: MatrixSpec,
        hamiltonian: MatrixSpec,
        tau: f64,
    },
}

impl DynamicsModel {
    pub fn tag(&self) -> &'static str {
        match self {
            DynamicsModel::Gad { .. } => "gad",
            DynamicsModel::Dephasing { .. } => "dephasing",
            DynamicsModel::ThermalKraus { .. } => "thermal-kraus",
            DynamicsModel::AppendixB { .. } => "appendix-b",
            DynamicsModel::Bipartite { .. } => "bipartite",
            DynamicsModel::Geodesic { .. } => "geodesic",
            DynamicsModel::Unitary { .. } => "unitary",
        }
    }

    pub fn tau(&self) -> f64 {
        match self {
            DynamicsModel::Gad { tau, .. }
            | DynamicsModel::Dephasing { tau, .. }
            | DynamicsModel::ThermalKraus { tau, .. }
            | DynamicsModel::AppendixB { tau, .. }
            | DynamicsModel::Bipartite { tau, .. }
            | DynamicsModel::Geodesic { tau, .. }
            | DynamicsModel::Unitary { tau, .. } => *tau,
        }
    }

    pub fn gad_params(excited: &[f64], law: &DecayLawSpec) -> Result<GADParams> {
        GADParams::new(excited.to_vec(), law.build()?)
    }

    pub fn kraus_params(
        c: f64,
        rho11: f64,
        rho10: Option<[f64; 2]>,
        schedule: KrausSchedule,
    ) -> Result<ThermalKrausParams> {
        match rho10 {
            Some([re, im]) => ThermalKrausParams::new(c, schedule, rho11, Complex64::new(re, im)),
            None => ThermalKrausParams::pure(c, schedule, rho11),
        }
    }

    /// Exact trajectory on `grid` uniform nodes.
    pub fn trajectory(&self, grid: usize) -> Result<Trajectory> {
        match self {
            DynamicsModel::Gad { excited, law, tau } => gad_trajectory(&Self::gad_params(excited, law)?, *tau, grid),
            DynamicsModel::Dephasing { rho0, law, tau } => {
                let params = DephasingParams {
                    rho0: density_from_spec(rho0)?,
                    law: law.build()?,
                };
                dephasing_trajectory(&params, *tau, grid)
            }
            DynamicsModel::ThermalKraus {
                c,
                rho11,
                rho10,
                schedule,
                tau,
            } => kraus_trajectory(&Self::kraus_params(*c, *rho11, *rho10, *schedule)?, *tau, grid),
            DynamicsModel::AppendixB {
                theta,
                omega_l,
                gamma,
                r0,
                tau,
            } => appendix_b_trajectory(&AppendixBParams::new(*theta, *omega_l, *gamma, *r0)?, *tau, grid),
            DynamicsModel::Bipartite { seed, diagonal_h, tau } => {
                Ok(bipartite_sample(RngSeed(*seed), *tau, grid, *diagonal_h)?.trajectory)
            }
            DynamicsModel::Geodesic {
                rho0,
                rho_tau,
                beta,
                tau,
            } => geodesic_path(
                &density_from_spec(rho0)?,
                &density_from_spec(rho_tau)?,
                (*beta).into(),
                *tau,
                grid,
            ),
            DynamicsModel::Unitary { rho0, hamiltonian, tau } => {
                unitary_trajectory(&matrix_from_spec(hamiltonian)?, &density_from_spec(rho0)?, *tau, grid)
            }
        }
    }

    /// RK4 trajectory with step `dt`, for models defined by a generator.
    pub fn integrated(&self, dt: f64) -> Result<Trajectory> {
        match self {
            DynamicsModel::Gad { excited, law, tau } => {
                let p = Self::gad_params(excited, law)?;
                let rho0 = gad_solution(&p, 0.0)?;
                integrate(gad_generator(&p), &rho0, *tau, dt, "gad")
            }
            DynamicsModel::Dephasing { rho0, law, tau } => {
                let law = law.build()?;
                let rho0 = density_from_spec(rho0)?;
                integrate(dephasing_generator(&law), &rho0, *tau, dt, "dephasing")
            }
            DynamicsModel::AppendixB {
                theta,
                omega_l,
                gamma,
                r0,
                tau,
            } => {
                let p = AppendixBParams::new(*theta, *omega_l, *gamma, *r0)?;
                let rho0 = appendix_b_solution(&p, 0.0)?;
                integrate(appendix_b_generator(&p), &rho0, *tau, dt, "appendix-b")
            }
            DynamicsModel::Unitary { rho0, hamiltonian, tau } => {
                let h = matrix_from_spec(hamiltonian)?;
                integrate(
                    |_, r| lindblad_rhs(Some(&h), &[], r),
                    &density_from_spec(rho0)?,
                    *tau,
                    dt,
                    "unitary",
                )
            }
            other => Err(Error::InvalidArgument(format!(
                "model '{}' has no generator to integrate",
                other.tag()
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_tagged_models() {
        let m: DynamicsModel = serde_json::from_str(
            r#"{"model": "gad", "excited": [0.6], "law": {"kind": "constant", "gamma": 1.0}, "tau": 0.5}"#,
        )
        .unwrap();
        assert_eq!(m.tag(), "gad");
        assert_eq!(m.trajectory(33).unwrap().len(), 33);

        let m: DynamicsModel = serde_json::from_str(
            r#"{"model": "dephasing", "rho0": [[0.5, 0.5], [0.5, 0.5]], "law": {"kind": "non-markov", "gamma0": 0.1, "lambda": 1.0}, "tau": 1.0}"#,
        )
        .unwrap();
        assert!(m.integrated(0.01).is_ok());
    }

    #[test]
    fn complex_entries() {
        let spec: MatrixSpec = serde_json::from_str("[[0.5, [0.0, -0.5]], [[0.0, 0.5], 0.5]]").unwrap();
        let rho = density_from_spec(&spec).unwrap();
        assert_eq!(rho.get(0, 1), Complex64::new(0.0, -0.5));
        assert_eq!(spec_from_matrix(rho.matrix()), spec);
    }

    #[test]
    fn unknown_fields_rejected() {
        let r: std::result::Result<DynamicsModel, _> =
            serde_json::from_str(r#"{"model": "gad", "excited": [0.6], "tau": 1.0, "bogus": 3}"#);
        assert!(r.is_err());
        let r: std::result::Result<DecayLawSpec, _> =
            serde_json::from_str(r#"{"kind": "constant", "gamma": 1.0, "x": 1}"#);
        assert!(r.is_err());
    }

    #[test]
    fn invalid_state_names_invariant() {
        let spec: MatrixSpec = serde_json::from_str("[[0.5, 0.0], [0.0, 0.6]]").unwrap();
        let err = density_from_spec(&spec).unwrap_err();
        assert!(err.to_string().contains("TraceNotOne"));
    }

    #[test]
    fn kraus_model_cannot_be_integrated() {
        let m = DynamicsModel::ThermalKraus {
            c: 0.5,
            rho11: 0.2,
            rho10: None,
            schedule: KrausSchedule::default(),
            tau: 10.0,
        };
        assert!(m.integrated(0.1).is_err());
        assert!(m.trajectory(17).is_ok());
    }
}

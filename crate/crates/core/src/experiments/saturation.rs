//! Saturation of the bound by amplitude damping and dephasing.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{converged_report, dephasing_arc_closed_form, gad_arc_closed_form, speeds, BoundReport};
use crate::dynamics::{coherence_ratio, GADParams};
use crate::error::{Error, Result};
use crate::model::{density_from_spec, spec_from_matrix, DecayLawSpec, DynamicsModel, MatrixSpec};
use crate::state::DensityMatrix;

use super::output::{json_f64, Cell};
use super::{ExperimentConfig, ExperimentId, OutputDir, RunOptions, RunOutcome};

const MAX_GRID: usize = (1 << 16) + 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SaturationParams {
    /// Amplitude damping: `λ₁ … λ_{N−1}`.
    pub excited: Vec<f64>,
    /// Dephasing: initial state; `|+⟩` when absent.
    pub rho0: Option<MatrixSpec>,
    pub law: Option<DecayLawSpec>,
    pub tau: Option<f64>,
    /// Amplitude damping with a constant rate: horizon from `q_τ`.
    pub q_tau: Option<f64>,
    /// Dephasing with a constant rate: horizon from `γ_τ`.
    pub gamma_tau: Option<f64>,
    /// RK4 step; exact solution when absent.
    pub dt: Option<f64>,
    pub start_grid: usize,
}

impl Default for SaturationParams {
    fn default() -> Self {
        Self {
            excited: vec![0.6],
            rho0: None,
            law: None,
            tau: None,
            q_tau: None,
            gamma_tau: None,
            dt: None,
            start_grid: 33,
        }
    }
}

impl SaturationParams {
    /// Fills the experiment-specific defaults.
    pub fn resolve(mut self, id: ExperimentId) -> Result<(Self, DynamicsModel)> {
        let law = match (&self.law, id) {
            (Some(l), _) => l.clone(),
            (None, ExperimentId::Nonmarkov) => DecayLawSpec::NonMarkov {
                gamma0: 5.0,
                lambda: 1.0,
            },
            (None, _) => DecayLawSpec::Constant { gamma: 1.0 },
        };
        self.law = Some(law.clone());
        let constant = match law {
            DecayLawSpec::Constant { gamma } => Some(gamma),
            _ => None,
        };
        let model = match id {
            ExperimentId::GadSaturation | ExperimentId::Nonmarkov => {
                let tau = match (self.tau, constant, id) {
                    (Some(t), _, _) => t,
                    (None, Some(g), ExperimentId::GadSaturation) => {
                        let q = *self.q_tau.get_or_insert(0.5);
                        if !(q > 0.0 && q <= 1.0) {
                            return Err(Error::Config(format!("q_tau = {q} outside (0, 1]")));
                        }
                        -q.ln() / g
                    }
                    // one oscillation of the rate at γ₀ = 5λ, λ = 1
                    (None, _, ExperimentId::Nonmarkov) => 2.0 * std::f64::consts::PI / 3.0,
                    _ => return Err(Error::Config("tau is required for non-constant decay laws".into())),
                };
                self.tau = Some(tau);
                DynamicsModel::Gad {
                    excited: self.excited.clone(),
                    law,
                    tau,
                }
            }
            ExperimentId::DephasingSaturation => {
                let rho0 = self
                    .rho0
                    .get_or_insert_with(|| {
                        spec_from_matrix(DensityMatrix::from_bloch([1.0, 0.0, 0.0]).unwrap().matrix())
                    })
                    .clone();
                let tau = match (self.tau, constant) {
                    (Some(t), _) => t,
                    (None, Some(g)) => *self.gamma_tau.get_or_insert(1.0) / g,
                    _ => return Err(Error::Config("tau is required for non-constant decay laws".into())),
                };
                self.tau = Some(tau);
                DynamicsModel::Dephasing { rho0, law, tau }
            }
            other => return Err(Error::Config(format!("{other} is not a saturation experiment"))),
        };
        Ok((self, model))
    }
}

/// Closed-form `(length, distance)` where the model has one and the decay
/// is monotone.
fn closed_form(model: &DynamicsModel) -> Result<Option<(f64, f64)>> {
    match model {
        DynamicsModel::Gad { excited, law, tau } => {
            let law = law.build()?;
            if !law.is_monotone_on(*tau) {
                return Ok(None);
            }
            let params = GADParams::new(excited.clone(), law)?;
            let q = params.law().survival(*tau)?;
            Ok(Some(gad_arc_closed_form(&params, q)?))
        }
        DynamicsModel::Dephasing { rho0, law, tau } => {
            let law = law.build()?;
            if !law.is_monotone_on(*tau) {
                return Ok(None);
            }
            let r = coherence_ratio(&density_from_spec(rho0)?);
            let gamma_tau = -law.survival(*tau)?.ln();
            Ok(Some(dephasing_arc_closed_form(r, gamma_tau)?))
        }
        _ => Ok(None),
    }
}

fn monotone(model: &DynamicsModel) -> Result<bool> {
    match model {
        DynamicsModel::Gad { law, tau, .. } | DynamicsModel::Dephasing { law, tau, .. } => {
            let law = law.build()?;
            Ok(law.is_markovian() || law.is_monotone_on(*tau))
        }
        _ => Ok(false),
    }
}

/// Report, closed form and speed profile for one saturation run.
pub struct SaturationResult {
    pub report: BoundReport,
    pub closed_form: Option<(f64, f64)>,
    pub monotone: bool,
    pub profile: Vec<(f64, f64, f64)>,
}

pub fn evaluate(model: &DynamicsModel, dt: Option<f64>, start_grid: usize) -> Result<SaturationResult> {
    let (report, traj) = match dt {
        Some(dt) => {
            let traj = model.integrated(dt)?;
            (crate::bounds::report(&traj)?, traj)
        }
        None => {
            let mut last = None;
            let report = converged_report(
                |n| {
                    let t = model.trajectory(n)?;
                    last = Some(t.clone());
                    Ok(t)
                },
                start_grid,
                MAX_GRID,
            )?;
            (report, last.expect("at least one trajectory"))
        }
    };
    let (vd, ve) = speeds(&traj)?;
    let profile = traj
        .times()
        .iter()
        .zip(vd)
        .zip(ve)
        .map(|((&t, d), e)| (t, d, e))
        .collect();
    Ok(SaturationResult {
        report,
        closed_form: closed_form(model)?,
        monotone: monotone(model)?,
        profile,
    })
}

pub fn run_saturation(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let raw: SaturationParams = config.params()?;
    let (p, model) = raw.resolve(config.experiment)?;
    let res = evaluate(&model, p.dt, p.start_grid)?;
    if !res.monotone {
        eprintln!("warning: decay law is not monotone on [0, tau]; saturation is not asserted");
    }
    let r = &res.report;
    let saturated = (r.ratio_qsl - 1.0).abs() <= 1e-6;
    let (cf_len, cf_dist) = match res.closed_form {
        Some((l, d)) => (json_f64(l), json_f64(d)),
        None => (Value::Null, Value::Null),
    };
    let summary = json!({
        "experiment": config.experiment.as_str(),
        "model": model.tag(),
        "tau": r.tau,
        "tau_qsl": r.tau_qsl,
        "ratio": r.ratio_qsl,
        "closed_form_length": cf_len,
        "closed_form_distance": cf_dist,
        "quadrature_length": r.length_d,
        "distance": r.dist_d,
        "tau_e": r.tau_e,
        "tau_phi": r.tau_phi,
        "nodes": r.nodes,
        "monotone": res.monotone,
        "saturation_asserted": res.monotone,
        "saturated": saturated,
    });
    let out = OutputDir::create(&opts.out, config.experiment.as_str())?;
    let rows: Vec<Vec<Cell>> = res
        .profile
        .iter()
        .map(|&(t, d, e)| vec![Cell::Float(t), Cell::Float(d), Cell::Float(e)])
        .collect();
    out.write_csv("data.csv", &["t", "v_d", "v_e"], &rows)?;
    out.write_errors(&[])?;
    out.write_json("summary.json", &summary)?;
    out.write_manifest(&config.resolved(&p)?)?;
    if opts.svg {
        let pts: Vec<(f64, f64)> = res.profile.iter().map(|&(t, d, _)| (t, d)).collect();
        out.write_text("plot.svg", &super::svg::scatter("speed v_D", "t", "v_D", &pts))?;
    }
    Ok(RunOutcome {
        dir: out.path().to_path_buf(),
        summary,
    })
}

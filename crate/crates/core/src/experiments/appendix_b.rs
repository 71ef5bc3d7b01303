//! Geodesic classification of the driven, damped qubit.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{is_geodesic, report, GeodesicCheck};
use crate::dynamics::{appendix_b_trajectory, AppendixBParams};
use crate::error::Result;

use super::output::Cell;
use super::{ExperimentConfig, OutputDir, RunOptions, RunOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AppendixBConfig {
    pub theta: f64,
    pub omega_l: f64,
    pub gamma: f64,
    pub r0: [f64; 3],
    pub tau: f64,
    pub grid: usize,
    pub tol: f64,
    pub scan: bool,
    pub scan_thetas: Vec<f64>,
    pub scan_r0: Vec<[f64; 3]>,
}

impl Default for AppendixBConfig {
    fn default() -> Self {
        Self {
            theta: PI / 4.0,
            omega_l: 1.0,
            gamma: 0.5,
            r0: [0.5, 0.0, 0.5],
            tau: 2.0,
            grid: 201,
            tol: 1e-6,
            scan: false,
            scan_thetas: vec![PI / 8.0, PI / 4.0, 3.0 * PI / 8.0],
            scan_r0: vec![[0.5, 0.0, 0.5], [0.5, 0.0, 0.3], [0.5, 0.2, 0.5]],
        }
    }
}

impl AppendixBConfig {
    pub fn points(&self) -> Vec<(f64, [f64; 3])> {
        if self.scan {
            self.scan_thetas
                .iter()
                .flat_map(|&t| self.scan_r0.iter().map(move |&r| (t, r)))
                .collect()
        } else {
            vec![(self.theta, self.r0)]
        }
    }

    /// Geodesic verdict and `τ_qsl/τ` at one point; `None` for a constant path.
    pub fn classify(&self, theta: f64, r0: [f64; 3]) -> Result<Option<(GeodesicCheck, f64)>> {
        let params = AppendixBParams::new(theta, self.omega_l, self.gamma, r0)?;
        let traj = appendix_b_trajectory(&params, self.tau, self.grid)?;
        if traj.initial().matrix().max_abs_diff(traj.last().matrix())? < 1e-12 {
            return Ok(None);
        }
        let check = is_geodesic(&traj, self.tol)?;
        Ok(Some((check, report(&traj)?.ratio_qsl)))
    }
}

pub fn run_appendix_b(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let p: AppendixBConfig = config.params()?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut verdicts = Vec::new();
    for (theta, r0) in p.points() {
        let id = format!("theta={theta};r0={:?}", r0);
        match p.classify(theta, r0) {
            Ok(Some((check, ratio))) => {
                verdicts.push(json!({
                    "theta": theta,
                    "r0": r0,
                    "is_geodesic": check.is_geodesic,
                    "max_residual": check.max_residual,
                    "monotone": check.monotone,
                    "ratio_qsl": ratio,
                }));
                rows.push(vec![
                    Cell::Float(theta),
                    Cell::Float(r0[0]),
                    Cell::Float(r0[1]),
                    Cell::Float(r0[2]),
                    Cell::Int(check.is_geodesic as u64),
                    Cell::Float(check.max_residual),
                    Cell::Float(ratio),
                ]);
            }
            Ok(None) => errors.push((id, "constant trajectory; geodesic check skipped".to_string())),
            Err(e) => errors.push((id, e.to_string())),
        }
    }
    let out = OutputDir::create(&opts.out, config.experiment.as_str())?;
    out.write_csv(
        "data.csv",
        &["theta", "rx0", "ry0", "rz0", "is_geodesic", "max_residual", "ratio_qsl"],
        &rows,
    )?;
    out.write_errors(&errors)?;
    let summary = json!({
        "experiment": config.experiment.as_str(),
        "points": verdicts,
        "skipped": errors.len(),
    });
    out.write_json("summary.json", &summary)?;
    out.write_manifest(&config.resolved(&p)?)?;
    Ok(RunOutcome {
        dir: out.path().to_path_buf(),
        summary,
    })
}

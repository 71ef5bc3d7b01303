//! One-shot bound report for a state pair or a model description.

use serde::Deserialize;
use serde_json::Value;

use crate::bounds::{converged_report, report, BoundReport};
use crate::error::{Error, Result};
use crate::model::{BetaSpec, DynamicsModel, MatrixSpec};

const MAX_GRID: usize = (1 << 16) + 1;

#[derive(Debug, Clone, Copy)]
pub struct BoundsOptions {
    /// RK4 step for generator-based models; exact solution when absent.
    pub dt: Option<f64>,
    pub start_grid: usize,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            dt: None,
            start_grid: 33,
        }
    }
}

fn default_tau() -> f64 {
    1.0
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StatePair {
    rho0: MatrixSpec,
    rho_tau: MatrixSpec,
    #[serde(default)]
    beta: BetaSpec,
    #[serde(default = "default_tau")]
    tau: f64,
}

fn invalid(e: serde_json::Error) -> Error {
    Error::InvalidArgument(format!("bounds input: {e}"))
}

/// Parses either `{"model": …}` or `{"rho0": …, "rho_tau": …}`; a state pair
/// is joined by the straight segment between them.
pub fn parse_input(text: &str) -> Result<DynamicsModel> {
    let v: Value = serde_json::from_str(text).map_err(invalid)?;
    if v.get("model").is_some() {
        return serde_json::from_value(v).map_err(invalid);
    }
    let pair: StatePair = serde_json::from_value(v).map_err(invalid)?;
    Ok(DynamicsModel::Geodesic {
        rho0: pair.rho0,
        rho_tau: pair.rho_tau,
        beta: pair.beta,
        tau: pair.tau,
    })
}

pub fn bounds_for_model(model: &DynamicsModel, opts: BoundsOptions) -> Result<BoundReport> {
    match opts.dt {
        Some(dt) => report(&model.integrated(dt)?),
        None => converged_report(|n| model.trajectory(n), opts.start_grid, MAX_GRID),
    }
}

pub fn bounds_from_json(text: &str, opts: BoundsOptions) -> Result<BoundReport> {
    bounds_for_model(&parse_input(text)?, opts)
}

//! Thermal Kraus channel: bound ratios over initial population and horizon.

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{converged_report, is_geodesic, BoundReport};
use crate::dynamics::{kraus_trajectory, KrausSchedule, ThermalKrausParams};
use crate::error::{Error, Result};

use super::output::{json_f64, Cell};
use super::{svg, ExperimentConfig, OutputDir, RunOptions, RunOutcome};

/// Largest grid tried by the length refinement.
const MAX_GRID: usize = (1 << 14) + 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig3Params {
    pub c: f64,
    /// Scale `s` of `p(t) = ln(1 + t/s)`.
    pub scale: f64,
    pub rho11_points: usize,
    pub tau_points: usize,
    pub tau_max: f64,
    pub start_grid: usize,
    pub geodesic_tol: f64,
}

impl Fig3Params {
    fn with_c(c: f64) -> Self {
        Self {
            c,
            scale: 100.0,
            rho11_points: 51,
            tau_points: 50,
            tau_max: 100.0,
            start_grid: 33,
            geodesic_tol: 1e-9,
        }
    }

    pub fn fig3a() -> Self {
        Self::with_c(0.5)
    }

    pub fn fig3b() -> Self {
        Self::with_c(0.0)
    }

    pub fn rho11_values(&self) -> Vec<f64> {
        let n = self.rho11_points;
        (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
    }

    pub fn tau_values(&self) -> Vec<f64> {
        let n = self.tau_points;
        (1..=n).map(|k| self.tau_max * k as f64 / n as f64).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.rho11_points < 2
            || self.tau_points < 1
            || self.tau_max.is_nan()
            || self.tau_max <= 0.0
            || self.scale.is_nan()
            || self.scale <= 0.0
        {
            return Err(Error::Config(
                "fig3 grid needs >= 2 populations, >= 1 horizon, positive tau_max".into(),
            ));
        }
        Ok(())
    }
}

impl Default for Fig3Params {
    fn default() -> Self {
        Self::fig3a()
    }
}

/// Outcome at one `(ρ₁₁, τ)` point.
pub enum PointResult {
    Evaluated {
        report: BoundReport,
        geodesic: bool,
        residual: f64,
    },
    Skipped(String),
}

/// Bounds for a pure initial state with excited population `rho11`.
pub fn evaluate_point(p: &Fig3Params, rho11: f64, tau: f64) -> Result<PointResult> {
    let schedule = KrausSchedule::LogOnePlus { scale: p.scale };
    if tau > schedule.horizon() {
        return Ok(PointResult::Skipped(format!(
            "tau = {tau} beyond the p(t) <= 1 horizon {}",
            schedule.horizon()
        )));
    }
    let params = ThermalKrausParams::pure(p.c, schedule, rho11)?;
    let coarse = kraus_trajectory(&params, tau, p.start_grid)?;
    if coarse.initial().matrix().max_abs_diff(coarse.last().matrix())? == 0.0 {
        return Ok(PointResult::Skipped(
            "constant trajectory (fixed point of the channel)".into(),
        ));
    }
    let check = is_geodesic(&coarse, p.geodesic_tol)?;
    let report = converged_report(|n| kraus_trajectory(&params, tau, n), p.start_grid, MAX_GRID)?;
    Ok(PointResult::Evaluated {
        report,
        geodesic: check.is_geodesic,
        residual: check.max_residual,
    })
}

struct Grid {
    rows: Vec<Vec<Cell>>,
    errors: Vec<(String, String)>,
    cells: Vec<Vec<Option<(BoundReport, bool)>>>,
}

fn sweep(p: &Fig3Params, row: impl Fn(f64, &BoundReport, bool, f64) -> Vec<Cell>) -> Result<Grid> {
    p.validate()?;
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut cells = Vec::new();
    for rho11 in p.rho11_values() {
        let mut col = Vec::new();
        for tau in p.tau_values() {
            let id = format!("rho11={rho11};tau={tau}");
            match evaluate_point(p, rho11, tau) {
                Ok(PointResult::Evaluated {
                    report,
                    geodesic,
                    residual,
                }) => {
                    rows.push(row(rho11, &report, geodesic, residual));
                    col.push(Some((report, geodesic)));
                }
                Ok(PointResult::Skipped(reason)) => {
                    errors.push((id, reason));
                    col.push(None);
                }
                Err(e) => {
                    errors.push((id, e.to_string()));
                    col.push(None);
                }
            }
        }
        cells.push(col);
    }
    Ok(Grid { rows, errors, cells })
}

fn columns_where(p: &Fig3Params, grid: &Grid, pred: impl Fn(&BoundReport, bool) -> bool) -> Vec<f64> {
    p.rho11_values()
        .into_iter()
        .zip(&grid.cells)
        .filter(|(_, col)| col.iter().any(Option::is_some) && col.iter().flatten().all(|(r, g)| pred(r, *g)))
        .map(|(x, _)| x)
        .collect()
}

pub fn run_fig3a(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut merged = config.clone();
    for (k, v) in serde_json::to_value(Fig3Params::fig3a())?.as_object().unwrap() {
        merged.params.entry(k.clone()).or_insert(v.clone());
    }
    let p: Fig3Params = merged.params()?;
    let grid = sweep(&p, |rho11, r, geo, res| {
        vec![
            Cell::Float(rho11),
            Cell::Float(r.tau),
            Cell::Float(r.ratio_qsl),
            Cell::Int(geo as u64),
            Cell::Float(res),
        ]
    })?;
    let out = OutputDir::create(&opts.out, config.experiment.as_str())?;
    out.write_csv(
        "data.csv",
        &["rho11", "tau", "ratio", "is_geodesic", "max_residual"],
        &grid.rows,
    )?;
    out.write_errors(&grid.errors)?;
    let max_ratio = grid
        .cells
        .iter()
        .flatten()
        .flatten()
        .map(|(r, _)| r.ratio_qsl)
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "experiment": config.experiment.as_str(),
        "c": p.c,
        "evaluated": grid.rows.len(),
        "skipped": grid.errors.len(),
        "max_ratio": json_f64(max_ratio),
        "saturated_columns": columns_where(&p, &grid, |r, _| (r.ratio_qsl - 1.0).abs() <= 1e-4),
        "geodesic_columns": columns_where(&p, &grid, |_, g| g),
    });
    out.write_json("summary.json", &summary)?;
    out.write_manifest(&config.resolved(&p)?)?;
    if opts.svg {
        let values: Vec<Vec<Option<f64>>> = grid
            .cells
            .iter()
            .map(|c| c.iter().map(|x| x.as_ref().map(|(r, _)| r.ratio_qsl)).collect())
            .collect();
        out.write_text(
            "plot.svg",
            &svg::heatmap(
                "tau_qsl / tau",
                "rho11",
                "tau",
                &p.rho11_values(),
                &p.tau_values(),
                &values,
            ),
        )?;
    }
    Ok(RunOutcome {
        dir: out.path().to_path_buf(),
        summary,
    })
}

pub fn run_fig3b(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let mut merged = config.clone();
    for (k, v) in serde_json::to_value(Fig3Params::fig3b())?.as_object().unwrap() {
        merged.params.entry(k.clone()).or_insert(v.clone());
    }
    let p: Fig3Params = merged.params()?;
    if p.c != 0.0 {
        return Err(Error::Config(format!("fig3b runs at c = 0, got c = {}", p.c)));
    }
    let grid = sweep(&p, |rho11, r, _, _| {
        vec![
            Cell::Float(rho11),
            Cell::Float(r.tau),
            Cell::Float(r.ratio_qsl),
            Cell::Float(r.ratio_e),
        ]
    })?;
    let out = OutputDir::create(&opts.out, config.experiment.as_str())?;
    out.write_csv("data.csv", &["rho11", "tau", "ratio_qsl", "ratio_e"], &grid.rows)?;
    out.write_errors(&grid.errors)?;
    let evaluated: Vec<&BoundReport> = grid.cells.iter().flatten().flatten().map(|(r, _)| r).collect();
    let violations: Vec<&&BoundReport> = evaluated.iter().filter(|r| r.tau_qsl < r.tau_e - 1e-8).collect();
    let min_gap = evaluated.iter().map(|r| r.gap).fold(f64::INFINITY, f64::min);
    let summary = json!({
        "experiment": config.experiment.as_str(),
        "c": p.c,
        "evaluated": evaluated.len(),
        "skipped": grid.errors.len(),
        "ordering_violations": violations.len(),
        "min_gap": json_f64(min_gap),
    });
    out.write_json("summary.json", &summary)?;
    out.write_manifest(&config.resolved(&p)?)?;
    if opts.svg {
        let pick = |f: fn(&BoundReport) -> f64| -> Vec<Vec<Option<f64>>> {
            grid.cells
                .iter()
                .map(|c| c.iter().map(|x| x.as_ref().map(|(r, _)| f(r))).collect())
                .collect()
        };
        let left = svg::heatmap(
            "tau_qsl / tau",
            "rho11",
            "tau",
            &p.rho11_values(),
            &p.tau_values(),
            &pick(|r| r.ratio_qsl),
        );
        let right = svg::heatmap(
            "tau_E / tau",
            "rho11",
            "tau",
            &p.rho11_values(),
            &p.tau_values(),
            &pick(|r| r.ratio_e),
        );
        out.write_text("plot.svg", &svg::side_by_side(&left, &right))?;
    }
    Ok(RunOutcome {
        dir: out.path().to_path_buf(),
        summary,
    })
}

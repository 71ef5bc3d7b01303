//! Random bipartite dynamics: initial purity against `τ_qsl − τ_E`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::report;
use crate::dynamics::bipartite_sample;
use crate::error::{Error, Result};
use crate::random::RngSeed;

use super::output::{json_f64, Cell};
use super::{svg, ExperimentConfig, OutputDir, RunOptions, RunOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Fig2Params {
    pub samples: u64,
    pub tau: f64,
    pub grid: usize,
    pub diagonal_h: bool,
}

impl Default for Fig2Params {
    fn default() -> Self {
        Self {
            samples: 1000,
            tau: 1.0,
            grid: 256,
            diagonal_h: true,
        }
    }
}

struct Row {
    seed: u64,
    purity: f64,
    tau_qsl: f64,
    tau_e: f64,
}

fn one(seed: u64, p: &Fig2Params) -> Result<Row> {
    let s = bipartite_sample(RngSeed(seed), p.tau, p.grid, p.diagonal_h)?;
    let r = report(&s.trajectory)?;
    let row = Row {
        seed,
        purity: s.initial_purity,
        tau_qsl: r.tau_qsl,
        tau_e: r.tau_e,
    };
    if ![row.purity, row.tau_qsl, row.tau_e].iter().all(|x| x.is_finite()) {
        return Err(Error::Numeric("non-finite bound".into()));
    }
    Ok(row)
}

pub fn run_fig2(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    let p: Fig2Params = config.params()?;
    if p.samples == 0 {
        return Err(Error::Config("samples must be >= 1".into()));
    }
    let base = RngSeed(config.seed());
    let results: Vec<(u64, Result<Row>)> = (0..p.samples)
        .into_par_iter()
        .map(|i| {
            let seed = base.split(i).0;
            (seed, one(seed, &p))
        })
        .collect();

    let mut rows = Vec::new();
    let mut errors = Vec::new();
    let mut points = Vec::new();
    let (mut pos, mut neg, mut zero) = (0u64, 0u64, 0u64);
    let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for (seed, r) in results {
        match r {
            Ok(r) => {
                let gap = r.tau_qsl - r.tau_e;
                match gap {
                    g if g > 0.0 => pos += 1,
                    g if g < 0.0 => neg += 1,
                    _ => zero += 1,
                }
                pmin = pmin.min(r.purity);
                pmax = pmax.max(r.purity);
                points.push((r.purity, gap));
                rows.push(vec![
                    Cell::Int(r.seed),
                    Cell::Float(r.purity),
                    Cell::Float(r.tau_qsl),
                    Cell::Float(r.tau_e),
                    Cell::Float(gap),
                ]);
            }
            Err(e) => errors.push((seed.to_string(), e.to_string())),
        }
    }

    let out = OutputDir::create(&opts.out, config.experiment.as_str())?;
    out.write_csv("data.csv", &["seed", "purity", "tau_qsl", "tau_e", "gap"], &rows)?;
    out.write_errors(&errors)?;
    let ok = rows.len() as f64;
    let summary = json!({
        "experiment": config.experiment.as_str(),
        "samples": p.samples,
        "succeeded": rows.len(),
        "failed": errors.len(),
        "positive_gap": pos,
        "negative_gap": neg,
        "zero_gap": zero,
        "positive_fraction": json_f64(pos as f64 / ok),
        "negative_fraction": json_f64(neg as f64 / ok),
        "purity_min": json_f64(pmin),
        "purity_max": json_f64(pmax),
    });
    out.write_json("summary.json", &summary)?;
    out.write_manifest(&config.resolved(&p)?)?;
    if opts.svg {
        out.write_text(
            "plot.svg",
            &svg::scatter(
                "initial purity vs tau_qsl - tau_E",
                "Tr rho_S^2",
                "tau_qsl - tau_E",
                &points,
            ),
        )?;
    }
    Ok(RunOutcome {
        dir: out.path().to_path_buf(),
        summary,
    })
}

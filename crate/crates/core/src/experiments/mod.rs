//! Reproducible experiment runners behind the `qsl` binary.
//!
//! Every run resolves an [`ExperimentConfig`], writes its outputs under
//! `<out>/<experiment>/` and records the resolved config as `manifest.json`,
//! which can be fed back through `--config` to replay the run.

mod appendix_b;
mod bounds_cmd;
mod fig2;
mod fig3;
mod output;
mod saturation;
pub mod svg;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use appendix_b::{run_appendix_b, AppendixBConfig};
pub use bounds_cmd::{bounds_for_model, bounds_from_json, parse_input, BoundsOptions};
pub use fig2::{run_fig2, Fig2Params};
pub use fig3::{evaluate_point, run_fig3a, run_fig3b, Fig3Params, PointResult};
pub use output::{format_float, json_f64, Cell, OutputDir};
pub use saturation::{evaluate as evaluate_saturation, run_saturation, SaturationParams, SaturationResult};

/// Base seed when neither the config nor the command line gives one.
pub const DEFAULT_SEED: u64 = 20_190_415;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    Fig2,
    Fig3a,
    Fig3b,
    GadSaturation,
    DephasingSaturation,
    Nonmarkov,
    AppendixB,
}

impl ExperimentId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::Fig2 => "fig2",
            ExperimentId::Fig3a => "fig3a",
            ExperimentId::Fig3b => "fig3b",
            ExperimentId::GadSaturation => "gad-saturation",
            ExperimentId::DephasingSaturation => "dephasing-saturation",
            ExperimentId::Nonmarkov => "nonmarkov",
            ExperimentId::AppendixB => "appendix-b",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        serde_json::from_value(Value::String(s.to_string()))
            .map_err(|_| Error::Config(format!("unknown experiment '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Parameter overrides; keys are checked against the experiment.
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: None,
            params: BTreeMap::new(),
            out: None,
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn set(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        let v = serde_json::to_value(value).map_err(|e| Error::Config(e.to_string()))?;
        self.params.insert(key.to_string(), v);
        Ok(())
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// Parses the parameter map into `P`, filling unset keys with defaults.
    pub fn params<P: DeserializeOwned>(&self) -> Result<P> {
        let map: serde_json::Map<String, Value> = self.params.clone().into_iter().collect();
        serde_json::from_value(Value::Object(map))
            .map_err(|e| Error::Config(format!("{} params: {e}", self.experiment)))
    }

    /// The config with `params` replaced by the fully resolved set.
    pub fn resolved<P: Serialize>(&self, params: &P) -> Result<Self> {
        let Value::Object(map) = serde_json::to_value(params).map_err(|e| Error::Config(e.to_string()))? else {
            return Err(Error::Config("parameters must serialize to an object".into()));
        };
        Ok(Self {
            experiment: self.experiment,
            seed: Some(self.seed()),
            params: map.into_iter().collect(),
            out: None,
        })
    }
}

/// Where and how a run writes its files.
#[derive(Debug, Clone)]
pub struct RunOptions {
    pub out: PathBuf,
    pub svg: bool,
}

/// Summary JSON returned by every runner and also written to disk.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub dir: PathBuf,
    pub summary: Value,
}

pub fn run(config: &ExperimentConfig, opts: &RunOptions) -> Result<RunOutcome> {
    match config.experiment {
        ExperimentId::Fig2 => run_fig2(config, opts),
        ExperimentId::Fig3a => run_fig3a(config, opts),
        ExperimentId::Fig3b => run_fig3b(config, opts),
        ExperimentId::GadSaturation | ExperimentId::DephasingSaturation | ExperimentId::Nonmarkov => {
            run_saturation(config, opts)
        }
        ExperimentId::AppendixB => run_appendix_b(config, opts),
    }
}

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qsl_core::experiments::{self, BoundsOptions, ExperimentConfig, ExperimentId, OutputDir, RunOptions};
use qsl_core::{Error, Result};

#[derive(Parser)]
#[command(name = "qsl", version, about = "Quantum speed limit times for open-system dynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// JSON experiment config.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Base seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output root; results go to <out>/<experiment>/.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write plot.svg.
    #[arg(long)]
    svg: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum SaturationModel {
    Gad,
    Dephasing,
    Nonmarkov,
}

#[derive(Subcommand)]
enum Command {
    /// Bound report for a state pair or model description (JSON).
    Bounds {
        /// Input file, or '-' for stdin.
        #[arg(long)]
        input: PathBuf,
        /// Integrate generator-based models with RK4 at this step.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Random bipartite dynamics: purity vs tau_qsl - tau_E.
    Fig2 {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        samples: Option<u64>,
    },
    /// Thermal Kraus channel, c = 0.5: tau_qsl/tau grid.
    Fig3a {
        #[command(flatten)]
        common: Common,
    },
    /// Thermal Kraus channel, c = 0: tau_qsl/tau and tau_E/tau grids.
    Fig3b {
        #[command(flatten)]
        common: Common,
    },
    /// Saturation by amplitude damping or dephasing.
    Saturation {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "gad")]
        model: SaturationModel,
        #[arg(long)]
        dt: Option<f64>,
    },
    /// Geodesic classification of the driven, damped qubit.
    AppendixB {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scan: bool,
    },
}

fn load(common: &Common, id: ExperimentId) -> Result<ExperimentConfig> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::new(id),
    };
    if cfg.experiment != id {
        return Err(Error::Config(format!(
            "config is for '{}' but the command runs '{id}'",
            cfg.experiment
        )));
    }
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    Ok(cfg)
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}") {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn run_experiment(common: &Common, cfg: ExperimentConfig) -> Result<()> {
    let out = common
        .out
        .clone()
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("qsl-out"));
    let outcome = experiments::run(&cfg, &RunOptions { out, svg: common.svg })?;
    emit(&serde_json::to_string_pretty(&outcome.summary)?)?;
    eprintln!("wrote {}", outcome.dir.display());
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Bounds { input, dt, out } => {
            let text = if input.as_os_str() == "-" {
                let mut s = String::new();
                std::io::stdin().read_to_string(&mut s)?;
                s
            } else {
                std::fs::read_to_string(&input)
                    .map_err(|e| Error::Config(format!("cannot read {}: {e}", input.display())))?
            };
            let opts = BoundsOptions {
                dt,
                ..BoundsOptions::default()
            };
            let report = experiments::bounds_from_json(&text, opts)?;
            emit(&serde_json::to_string_pretty(&report)?)?;
            if let Some(root) = out {
                OutputDir::create(&root, "bounds")?.write_json("summary.json", &report)?;
            }
            Ok(())
        }
        Command::Fig2 { common, samples } => {
            let mut cfg = load(&common, ExperimentId::Fig2)?;
            if let Some(n) = samples {
                cfg.set("samples", n)?;
            }
            run_experiment(&common, cfg)
        }
        Command::Fig3a { common } => run_experiment(&common, load(&common, ExperimentId::Fig3a)?),
        Command::Fig3b { common } => run_experiment(&common, load(&common, ExperimentId::Fig3b)?),
        Command::Saturation { common, model, dt } => {
            let id = match model {
                SaturationModel::Gad => ExperimentId::GadSaturation,
                SaturationModel::Dephasing => ExperimentId::DephasingSaturation,
                SaturationModel::Nonmarkov => ExperimentId::Nonmarkov,
            };
            let mut cfg = load(&common, id)?;
            if let Some(dt) = dt {
                cfg.set("dt", dt)?;
            }
            run_experiment(&common, cfg)
        }
        Command::AppendixB { common, scan } => {
            let mut cfg = load(&common, ExperimentId::AppendixB)?;
            if scan {
                cfg.set("scan", true)?;
            }
            run_experiment(&common, cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

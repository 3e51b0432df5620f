//! `avgsim`: simulate the averaging process, check its invariants and run
//! the Monte Carlo experiments.
//!
//! Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 usage error,
//! 3 resource limit hit (region cap, search budget).

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use averaging::schedule::DEFAULT_REGION_CAP;
use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{CheckArgs, ExperimentArgs, Format, Job, ReplayArgs, RunConfig, SimulateArgs};
use output::Output;

/// Overrides the lazy-region safety cap (vertices).
const REGION_CAP_ENV: &str = "AVGSIM_REGION_CAP";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] averaging::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_resource() => 3,
            _ => 2,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "avgsim", version, about = "Averaging process and SAD duality simulator")]
struct Cli {
    /// Master seed; every random stream is derived from it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for replica loops (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Format of data tables (reports are always JSON).
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample one trajectory and write snapshots plus a summary.
    Simulate(SimulateArgs),
    /// Run a diagnostic suite: duality, bounds, energy or simplif.
    Check(CheckArgs),
    /// Run a Monte Carlo experiment: mean, l2, decay, symmetry or consensus.
    Experiment(ExperimentArgs),
    /// Re-run the dynamics from a saved update trace.
    TraceReplay(ReplayArgs),
    /// Re-run from a `config.json` written by an earlier run.
    Rerun {
        config: PathBuf,
    },
}

fn region_cap() -> Result<usize, CliError> {
    match std::env::var(REGION_CAP_ENV) {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("{REGION_CAP_ENV}={s}: {e}"))),
        Err(_) => Ok(DEFAULT_REGION_CAP),
    }
}

fn configure_threads(jobs: Option<usize>) -> Result<(), CliError> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))?;
    Ok(())
}

fn run(cli: Cli) -> Result<bool, CliError> {
    configure_threads(cli.jobs)?;
    let mut config = match cli.command {
        Command::Rerun { config } => {
            let text = std::fs::read_to_string(&config).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", config.display())))?;
            serde_json::from_str::<RunConfig>(&text).map_err(|e| CliError::Usage(format!("{}: {e}", config.display())))?
        }
        cmd => {
            let job = match cmd {
                Command::Simulate(a) => Job::Simulate(a),
                Command::Check(a) => Job::Check(a),
                Command::Experiment(a) => Job::Experiment(a),
                Command::TraceReplay(a) => Job::TraceReplay(a),
                Command::Rerun { .. } => unreachable!(),
            };
            RunConfig {
                seed: cli.seed,
                format: cli.format,
                region_cap: region_cap()?,
                job,
            }
        }
    };
    let out = Output::new(&cli.out);
    commands::execute(&mut config, &out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

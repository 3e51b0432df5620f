//! Resolved run configuration, echoed into every output file.

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn ext(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Duality,
    Bounds,
    Energy,
    Simplif,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExperimentName {
    Mean,
    L2,
    Decay,
    Symmetry,
    Consensus,
}

/// Graph and clock options shared by every command.
#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockArgs {
    /// Graph spec, e.g. `cycle:n=100`, `lattice:d=2`, `tree:b=3`, `file:path=g.txt`.
    #[arg(long, default_value = "lattice:d=2")]
    pub graph: String,
    /// Update weight law: `half`, `fixed:MU` or `uniform:LO,HI`.
    #[arg(long)]
    pub mu: Option<String>,
    /// Poisson intensity of every edge clock.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub clock: ClockArgs,
    /// Initial law: `dirac:C`, `bernoulli:P`, `uniform:A,B`, `gaussian:M,VAR`, `pareto:ALPHA,SCALE`, `delta:VERTEX`.
    #[arg(long)]
    pub law: Option<String>,
    /// Horizon.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Observed vertex on infinite graphs (default: the origin).
    #[arg(long)]
    pub root: Option<String>,
    /// Snapshot times (default: 0 and the horizon).
    #[arg(long, value_delimiter = ',')]
    pub snapshots: Option<Vec<f64>>,
    /// Also write the sampled update trace (finite graphs).
    #[arg(long)]
    pub trace: bool,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckArgs {
    #[arg(value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    #[serde(flatten)]
    pub clock: ClockArgs,
    /// Horizon of each sampled sequence.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Step cap per sequence (duality, energy).
    #[arg(long)]
    pub max_steps: Option<usize>,
    /// Random subsets per large SAD support (bounds).
    #[arg(long, default_value_t = 1000)]
    pub random_subsets: usize,
    /// Initial law (energy).
    #[arg(long)]
    pub law: Option<String>,
    /// Track energy in exact dyadic arithmetic instead of f64.
    #[arg(long)]
    pub exact: bool,
    /// Number of updates searched (simplif).
    #[arg(long, default_value_t = 4)]
    pub n_updates: usize,
    /// Weight grid resolution (simplif).
    #[arg(long, default_value_t = 0.05)]
    pub resolution: f64,
    /// Node budget of the exhaustive search (simplif).
    #[arg(long, default_value_t = 1_000_000_000)]
    pub budget: u128,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentArgs {
    #[arg(value_enum)]
    pub name: ExperimentName,
    #[command(flatten)]
    #[serde(flatten)]
    pub clock: ClockArgs,
    #[arg(long)]
    pub law: Option<String>,
    /// Observation horizons (mean, l2, decay).
    #[arg(long, value_delimiter = ',')]
    pub horizons: Option<Vec<f64>>,
    /// Horizon of the symmetry test.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub replicas: Option<usize>,
    /// Observed vertex (mean, l2).
    #[arg(long)]
    pub root: Option<String>,
    /// Source vertex (decay, symmetry).
    #[arg(long)]
    pub u: Option<String>,
    /// Target vertex (decay, symmetry).
    #[arg(long)]
    pub v: Option<String>,
    /// Radius parameter of the recipient cap (decay).
    #[arg(long, default_value_t = 0.25)]
    pub epsilon: f64,
    /// Family-wise KS level (symmetry).
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    /// Number of pairs sharing the Bonferroni correction (symmetry).
    #[arg(long, default_value_t = 1)]
    pub pairs: usize,
    /// Spread threshold (consensus).
    #[arg(long, default_value_t = 1e-6)]
    pub tolerance: f64,
    /// Step budget (consensus).
    #[arg(long, default_value_t = 10_000_000)]
    pub budget: u64,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReplayArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub clock: ClockArgs,
    /// Trace CSV written by `simulate --trace`.
    #[arg(long)]
    pub trace: PathBuf,
    #[arg(long)]
    pub law: Option<String>,
}

/// A runnable job: one command with every default filled in.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Job {
    Simulate(SimulateArgs),
    Check(CheckArgs),
    Experiment(ExperimentArgs),
    TraceReplay(ReplayArgs),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Format,
    pub region_cap: usize,
    pub job: Job,
}

impl RunConfig {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config is plain data")
    }

    /// Single-line JSON, used for CSV comment headers.
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("config is plain data")
    }
}

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gmm_moments::modelsolve::ModelClass;

#[derive(Debug, Parser)]
#[command(name = "gmm-moments", version, about = "Gaussian mixture recovery from moments by homotopy continuation")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Default, Args)]
pub struct GlobalArgs {
    /// Seed for every random choice (γ constants, start systems, models).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub newton_tol: Option<f64>,
    #[arg(long, global = true)]
    pub final_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_step: Option<f64>,
    /// Worker threads (0: one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// Permit total-degree solves beyond the default path budget.
    #[arg(long, global = true)]
    pub allow_large: bool,
    /// JSON file with any of the global options.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// General weights, means and covariances.
    #[value(name = "1")]
    One,
    /// Uniform weights with a known shared covariance.
    #[value(name = "2")]
    Two,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample moments of a CSV file.
    Moments(MomentsArgs),
    /// Solve one univariate moment system.
    Solve(SolveArgs),
    /// Recover a multivariate mixture.
    Recover(RecoverArgs),
    /// Check solution counts on random generic targets.
    Selftest(SelftestArgs),
    /// Round-trip timing and error on random diagonal models.
    Benchmark(BenchmarkArgs),
    /// Solve a generic general-class instance for parameter homotopies.
    PrecomputeStart(PrecomputeArgs),
}

#[derive(Debug, Args)]
pub struct MomentsArgs {
    #[arg(long)]
    pub samples: PathBuf,
    /// Emit the moments the recovery pipeline needs for this k.
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long, value_enum, default_value = "1")]
    pub algorithm: Algorithm,
    /// Emit axis moments of orders 1..=max on every coordinate.
    #[arg(long)]
    pub max_order: Option<u32>,
    /// Explicit multi-indices, e.g. "1,0;2,1".
    #[arg(long)]
    pub keys: Option<String>,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Moment table JSON.
    #[arg(long)]
    pub moments: PathBuf,
    #[arg(long, value_parser = parse_class)]
    pub class: ModelClass,
    #[arg(long)]
    pub k: usize,
    /// Coordinate (1-based) of a multivariate table to solve on.
    #[arg(long, default_value_t = 1)]
    pub coordinate: usize,
    /// Known weights; means-only defaults to uniform.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub weights: Option<Vec<f64>>,
    /// Known per-component variances (means-only).
    #[arg(long, value_delimiter = ',')]
    pub vars: Option<Vec<f64>>,
    /// Known variance shared by all components (means-only).
    #[arg(long, conflicts_with = "vars")]
    pub variance: Option<f64>,
    /// Print the polynomial system to stderr.
    #[arg(long)]
    pub dump_system: bool,
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long, required_unless_present = "samples", conflicts_with = "samples")]
    pub moments: Option<PathBuf>,
    /// Samples CSV; sample moments are computed first.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    #[arg(long)]
    pub k: usize,
    /// Skip the first univariate stage and use these weights.
    #[arg(long, value_delimiter = ',')]
    pub known_weights: Option<Vec<f64>>,
    /// Pick the first-coordinate solution by moments 3k..4k-2.
    #[arg(long)]
    pub extended_selection: bool,
    /// Known shared covariance (JSON matrix); selects the uniform-weight
    /// pipeline.
    #[arg(long)]
    pub uniform_equal_cov: Option<PathBuf>,
    /// True parameters JSON; the report then includes the normalized error.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Parameter JSON destination (default stdout).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Report JSON destination (default stderr).
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 2)]
    pub k_max: usize,
    /// Random targets per class and k.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct BenchmarkArgs {
    #[arg(long)]
    pub k: usize,
    #[arg(long, value_delimiter = ',', default_value = "10")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Also write the table as CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PrecomputeArgs {
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(short, long)]
    pub output: PathBuf,
}

fn parse_class(s: &str) -> Result<ModelClass, String> {
    s.parse().map_err(|e: gmm_moments::Error| e.to_string())
}

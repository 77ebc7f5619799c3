//! Command-line front end: moment computation, univariate solves,
//! multivariate recovery, count self-tests and benchmarks.

pub mod args;
pub mod commands;
pub mod config;
pub mod sampler;

use gmm_moments::{Error, Result};

use crate::args::{Cli, Command};
use crate::config::RunConfig;

pub const EXIT_OK: i32 = 0;
/// The solve finished but no solution is statistically meaningful.
pub const EXIT_NO_MEANINGFUL: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_SOLVER: i32 = 4;

/// Exit status for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoMeaningfulSolution { .. } => EXIT_NO_MEANINGFUL,
        Error::AllPathsFailed { .. } | Error::SingularLinearSystem { .. } | Error::NoCandidates => EXIT_SOLVER,
        _ => EXIT_INPUT,
    }
}

pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::resolve(&cli.global)?;
    match &cli.command {
        Command::Moments(a) => commands::moments(a, &cfg),
        Command::Solve(a) => commands::solve(a, &cfg),
        Command::Recover(a) => commands::recover(a, &cfg),
        Command::Selftest(a) => commands::selftest(a, &cfg),
        Command::Benchmark(a) => commands::benchmark(a, &cfg),
        Command::PrecomputeStart(a) => commands::precompute(a, &cfg),
    }
}

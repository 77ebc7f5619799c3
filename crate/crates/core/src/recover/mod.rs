//! High-dimensional recovery: univariate homotopy solves on single
//! coordinates followed by linear solves for the coupling parameters.

mod linear;
mod pipeline;
mod plan;
mod report;

pub use linear::{cross_covariance_system, solve_dense, uniform_mean_system, LinearSolve};
pub use pipeline::{algorithm1, algorithm2};
pub use plan::{path_count, Pipeline, RecoveryOptions, RecoveryPlan};
pub use report::{moment_mismatch, RecoveryReport};

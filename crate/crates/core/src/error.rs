use thiserror::Error;

use crate::moments::MomentKey;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("system is not square: {polys} polynomials in {vars} variables")]
    NotSquare { polys: usize, vars: usize },

    #[error("polynomial {index} has degree zero")]
    ZeroDegree { index: usize },

    #[error("every parameter is fixed; nothing to solve")]
    NothingToSolve,

    #[error("moment order {order} exceeds the configured maximum {max}")]
    OrderTooLarge { order: u32, max: u32 },

    #[error("missing required moment {0}")]
    MissingMoment(MomentKey),

    #[error("no samples")]
    NoSamples,

    #[error("non-finite value in input at row {row}, column {column}")]
    NonFinite { row: usize, column: usize },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid settings: {0}")]
    InvalidSettings(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("every homotopy path failed ({paths} tracked); target moments look degenerate")]
    AllPathsFailed { paths: usize },

    #[error("no statistically meaningful solution at {stage}")]
    NoMeaningfulSolution { stage: String },

    #[error("singular linear system at {stage} (condition estimate {condition:e})")]
    SingularLinearSystem { stage: String, condition: f64 },

    #[error("empty candidate list")]
    NoCandidates,

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

//! Predictor-corrector path tracking for `H(x; t) = γ(1 − t)G(x) + tF(x)`,
//! plus binomial and total-degree start systems.

mod family;
mod linalg;
mod projective;
mod settings;
mod solve;
mod start;
mod track;

pub use family::{Homotopy, ParameterHomotopy, StraightLineHomotopy};
pub use linalg::Lu;
pub use projective::ProjectiveHomotopy;
pub use settings::{TrackerSettings, SINGULAR_CONDITION};
pub use solve::{random_gamma, solve_system, straight_line, track_all, track_path, with_workers, PathStats};
pub use start::{
    binomial_pattern, binomial_segments, binomial_start, binomial_start_with, roots_of_unity, total_degree_point,
    total_degree_start, unit_complex, Binomial, StartKind, StartSystem,
};
pub use track::{PathResult, PathStatus, Tracker};

//! Univariate moment systems for each model class: construction, solving,
//! filtering and deduplication of solutions.

mod class;
mod general;
mod solve;
mod system;

pub use class::ModelClass;
pub use general::{
    bundled_start, complete_by_monodromy, path_count as general_path_count, precompute_general_start,
    total_degree as general_total_degree, GeneralStart, MONODROMY_STALL,
};
pub use solve::{
    canonical_cmp, class_path_count, dedup_exact, dedup_label_swap, filter_meaningful, prepared_system, retag,
    select_by_moments, select_by_next_moment, solve_class, ClassSolution, ComplexParams, SolveOptions, Tolerances,
    UnivariateSolution, DEFAULT_PATH_BUDGET,
};
pub use system::{build_system, check_knowns, MomentSystem, Standardization};

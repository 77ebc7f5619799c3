//! Gaussian and mixture moments: the univariate recursion, mixture moment
//! polynomials, multivariate moments from the moment generating function,
//! and sample moments.

mod gaussian;
mod multivariate;
mod params;
mod samples;
mod table;
mod univariate;

pub use gaussian::{gaussian_moment, gaussian_moment_terms, gaussian_moments_upto, MomentRing};
pub use multivariate::{
    default_max_order, exact_moments, exact_moments_with_max, gaussian_multi_moment, moment_template,
    multivariate_moment_poly, multivariate_moment_poly_with_max, MomentTemplate, MultiLayout,
};
pub use params::{permutations, MixtureParams};
pub use samples::{sample_moments, Samples};
pub use table::{MomentKey, MomentTable};
pub use univariate::{mixture_moment_in, mixture_moment_poly, Knowns, ParamLayout, Slot};

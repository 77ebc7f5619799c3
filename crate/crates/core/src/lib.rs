//! Parameter recovery for Gaussian mixture models by the method of moments.
//!
//! Moment equations are sparse polynomial systems; they are solved by
//! homotopy continuation from binomial or total-degree start systems.
//! High-dimensional mixtures are recovered coordinate by coordinate with
//! linear solves for the cross-covariances.

pub mod error;
pub mod homotopy;
pub mod modelsolve;
pub mod moments;
pub mod polysys;
pub mod recover;

pub use error::{Error, Result};

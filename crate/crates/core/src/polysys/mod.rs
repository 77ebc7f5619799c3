//! Sparse multivariate polynomials over ℂ, square systems of them, and the
//! line-segment mixed volume used to count start solutions.

mod compiled;
mod mixed_volume;
mod poly;
mod system;

pub use compiled::{CompiledSystem, EvalWorkspace};
pub use mixed_volume::{segment_mixed_volume, LineSegmentSupport};
pub use poly::{Exponents, SparsePoly, C64};
pub(crate) use poly::CompensatedSum;
pub use system::PolySystem;

/// `f.evaluate(x)`.
pub fn evaluate(f: &SparsePoly, x: &[C64]) -> crate::Result<C64> {
    f.evaluate(x)
}

/// `F.jacobian(x)`.
pub fn jacobian(system: &PolySystem, x: &[C64]) -> crate::Result<nalgebra::DMatrix<C64>> {
    system.jacobian(x)
}

/// `F.bezout_bound()`.
pub fn bezout_bound(system: &PolySystem) -> u128 {
    system.bezout_bound()
}

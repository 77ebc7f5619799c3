//! Total-degree tracking on a random affine chart of projective space.
//!
//! Paths heading to large or infinite solutions stay bounded on the chart,
//! so the step-size floor is not spent chasing them. Endpoints are mapped
//! back and polished on the affine target.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::family::{Homotopy, StraightLineHomotopy};
use super::settings::TrackerSettings;
use super::solve::{random_gamma, track_all};
use super::start::unit_complex;
use super::track::{PathResult, PathStatus, Tracker};
use crate::error::{Error, Result};
use crate::polysys::{CompiledSystem, PolySystem, SparsePoly, C64};

/// `γ(1 − t)Ĝ + tF̂` on `n + 1` homogeneous coordinates, where the hats
/// mark homogenized systems with the chart equation `a·(x, x₀) = 1`
/// appended.
pub struct ProjectiveHomotopy {
    inner: StraightLineHomotopy,
    affine: StraightLineHomotopy,
    chart: Vec<C64>,
    n: usize,
}

fn homogenized(system: &PolySystem, chart: &[C64]) -> Result<PolySystem> {
    let n = system.nvars();
    let mut polys: Vec<SparsePoly> = system.polys().iter().map(|p| p.homogenize(p.total_degree())).collect();
    let mut patch = SparsePoly::constant(n + 1, -1.0);
    for (j, &a) in chart.iter().enumerate() {
        patch = &patch + &SparsePoly::variable(n + 1, j).scale(a);
    }
    polys.push(patch);
    let mut names = system.var_names().to_vec();
    names.push("x0".into());
    PolySystem::with_names(polys, names)
}

impl ProjectiveHomotopy {
    /// `start` must share the per-equation degrees of `target`, as the
    /// total-degree start does.
    pub fn new(target: &PolySystem, start: &PolySystem, settings: &TrackerSettings) -> Result<Self> {
        target.ensure_square()?;
        start.ensure_square()?;
        if target.nvars() != start.nvars() {
            return Err(Error::DimensionMismatch {
                expected: target.nvars(),
                got: start.nvars(),
            });
        }
        let n = target.nvars();
        let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
        rng.set_stream(4);
        let chart: Vec<C64> = (0..=n).map(|_| unit_complex(&mut rng)).collect();
        let t = CompiledSystem::new(target);
        Ok(ProjectiveHomotopy {
            inner: StraightLineHomotopy::new(
                CompiledSystem::new(&homogenized(start, &chart)?),
                CompiledSystem::new(&homogenized(target, &chart)?),
                random_gamma(settings.seed),
            ),
            affine: StraightLineHomotopy::new(t.clone(), t, C64::new(1.0, 0.0)),
            chart,
            n,
        })
    }

    /// Puts the affine point `p` on the chart.
    pub fn lift(&self, p: &[C64]) -> Vec<C64> {
        let mut q = p.to_vec();
        q.push(C64::new(1.0, 0.0));
        let s: C64 = q.iter().zip(&self.chart).map(|(x, a)| x * a).sum();
        q.iter().map(|x| x / s).collect()
    }

    /// Tracks affine start points; endpoints and residuals are affine.
    pub fn track(&self, starts: &[Vec<C64>], settings: &TrackerSettings) -> Vec<PathResult> {
        let lifted: Vec<Vec<C64>> = starts.iter().map(|p| self.lift(p)).collect();
        let raw = track_all(&self.inner, &lifted, settings);
        let mut polisher = Tracker::new(&self.affine, settings);
        raw.into_iter().map(|r| self.land(r, &mut polisher, settings)).collect()
    }

    fn land(&self, r: PathResult, polisher: &mut Tracker<'_, StraightLineHomotopy>, settings: &TrackerSettings) -> PathResult {
        let x0 = r.endpoint[self.n];
        let y: Vec<C64> = r.endpoint[..self.n].iter().map(|x| x / x0).collect();
        let far = y
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()) || z.norm() > settings.divergence_norm);
        if far {
            return PathResult {
                endpoint: y,
                residual: f64::INFINITY,
                status: PathStatus::Diverged,
                condition: f64::INFINITY,
                ..r
            };
        }
        // at t = 1 the homogeneous residual is only a proxy; the affine
        // target decides
        if r.status == PathStatus::Converged || (r.status == PathStatus::Singular && r.t >= 1.0) {
            let mut out = polisher.polish(y, r.steps_taken);
            out.t = r.t;
            return out;
        }
        let residual = self.affine_residual(&y);
        PathResult {
            endpoint: y,
            residual,
            ..r
        }
    }

    fn affine_residual(&self, y: &[C64]) -> f64 {
        let mut ws = self.affine.workspace();
        let mut f = vec![C64::new(0.0, 0.0); self.n];
        self.affine.evaluate_target(y, &mut ws, &mut f, None);
        f.iter()
            .map(|z| z.norm())
            .fold(0.0, |m, a| if a.is_nan() { f64::INFINITY } else { m.max(a) })
    }
}

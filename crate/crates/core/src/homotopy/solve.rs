use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::family::{Homotopy, StraightLineHomotopy};
use super::settings::TrackerSettings;
use super::projective::ProjectiveHomotopy;
use super::start::{StartKind, StartSystem};
use super::track::{PathResult, PathStatus, Tracker};
use crate::error::{Error, Result};
use crate::polysys::{CompiledSystem, PolySystem, C64};

/// Unit-modulus γ whose argument stays at least 1e−3 away from 0 and π.
pub fn random_gamma(seed: u64) -> C64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    loop {
        let theta: f64 = rng.random_range(0.0..2.0 * PI);
        let near = |a: f64| (theta - a).abs() < 1e-3;
        if !(near(0.0) || near(PI) || near(2.0 * PI)) {
            return C64::from_polar(1.0, theta);
        }
    }
}

/// Counts of path outcomes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathStats {
    pub paths: usize,
    pub converged: usize,
    pub diverged: usize,
    pub singular: usize,
    pub step_limit: usize,
}

impl PathStats {
    pub fn from_results(results: &[PathResult]) -> Self {
        let mut s = PathStats {
            paths: results.len(),
            ..Default::default()
        };
        for r in results {
            match r.status {
                PathStatus::Converged => s.converged += 1,
                PathStatus::Diverged => s.diverged += 1,
                PathStatus::Singular => s.singular += 1,
                PathStatus::StepLimit => s.step_limit += 1,
            }
        }
        s
    }

    pub fn merge(&mut self, other: &PathStats) {
        self.paths += other.paths;
        self.converged += other.converged;
        self.diverged += other.diverged;
        self.singular += other.singular;
        self.step_limit += other.step_limit;
    }
}

/// Runs `f` inside a pool of `workers` threads (0: the global pool).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    if workers == 0 {
        return f();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool.install(f),
        Err(_) => f(),
    }
}

/// Tracks every start point of `h`; results come back in start order.
pub fn track_all<H: Homotopy>(h: &H, starts: &[Vec<C64>], settings: &TrackerSettings) -> Vec<PathResult> {
    with_workers(settings.workers, || {
        starts
            .par_iter()
            .map_init(|| Tracker::new(h, settings), |tracker, p| tracker.track(p))
            .collect()
    })
}

fn check_shapes(target: &PolySystem, start: &PolySystem) -> Result<()> {
    target.ensure_square()?;
    start.ensure_square()?;
    if target.nvars() != start.nvars() {
        return Err(Error::DimensionMismatch {
            expected: target.nvars(),
            got: start.nvars(),
        });
    }
    Ok(())
}

/// `γ(1 − t)G + tF` with γ drawn from `settings.seed`.
pub fn straight_line(target: &PolySystem, start: &PolySystem, settings: &TrackerSettings) -> Result<StraightLineHomotopy> {
    check_shapes(target, start)?;
    Ok(StraightLineHomotopy::new(
        CompiledSystem::new(start),
        CompiledSystem::new(target),
        random_gamma(settings.seed),
    ))
}

/// Follows one path from a root of `start` to a root of `target`.
pub fn track_path(start: &PolySystem, target: &PolySystem, start_point: &[C64], settings: &TrackerSettings) -> Result<PathResult> {
    settings.validate()?;
    let h = straight_line(target, start, settings)?;
    if start_point.len() != h.nvars() {
        return Err(Error::DimensionMismatch {
            expected: h.nvars(),
            got: start_point.len(),
        });
    }
    Ok(Tracker::new(&h, settings).track(start_point))
}

/// Tracks every start point of `start` to `target`. Total-degree starts
/// are tracked projectively, see [`ProjectiveHomotopy`].
pub fn solve_system(target: &PolySystem, start: &StartSystem, settings: &TrackerSettings) -> Result<Vec<PathResult>> {
    settings.validate()?;
    if start.kind == StartKind::TotalDegree {
        let h = ProjectiveHomotopy::new(target, &start.system, settings)?;
        return Ok(h.track(&start.points, settings));
    }
    let h = straight_line(target, &start.system, settings)?;
    Ok(track_all(&h, &start.points, settings))
}

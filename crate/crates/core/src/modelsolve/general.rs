use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{
    solve_system, total_degree_point, total_degree_start, track_all, ParameterHomotopy, PathResult,
    ProjectiveHomotopy, TrackerSettings,
};
use crate::moments::{permutations, Knowns, MomentTable};
use crate::polysys::{CompiledSystem, PolySystem, C64};

use super::class::ModelClass;
use super::solve::{SolveOptions, DEFAULT_PATH_BUDGET};
use super::system::{build_system, MomentSystem};

/// Total degree `(3k)!` of the general system `f_0 … f_{3k−1}`.
pub fn total_degree(k: usize) -> u128 {
    (1..=3 * k as u128).product()
}

/// Paths tracked for the general class with default options: the total
/// degree, except where a precomputed generic instance is bundled.
pub fn path_count(k: usize) -> u128 {
    match bundled_start(k) {
        Some(s) => s.solution_count() as u128,
        None => total_degree(k),
    }
}

/// Every solution of the general system at one generic complex moment
/// vector, stored as one representative per label-swap orbit.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneralStart {
    pub k: usize,
    /// `m̂_1 … m̂_{3k−1}` as `[re, im]` pairs.
    pub moments: Vec<[f64; 2]>,
    /// Orbit representatives in the order `(λ₁..λ_k, µ₁..µ_k, σ₁²..σ_k²)`.
    pub representatives: Vec<Vec<[f64; 2]>>,
}

fn to_c(v: &[[f64; 2]]) -> Vec<C64> {
    v.iter().map(|&[re, im]| C64::new(re, im)).collect()
}

fn from_c(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

/// Relabels components of a point in general-class order.
fn permute_point(x: &[C64], k: usize, p: &[usize]) -> Vec<C64> {
    let mut out = x.to_vec();
    for block in 0..3 {
        for (l, &src) in p.iter().enumerate() {
            out[block * k + l] = x[block * k + src];
        }
    }
    out
}

impl GeneralStart {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn start_moments(&self) -> Vec<C64> {
        to_c(&self.moments)
    }

    /// All solutions: each representative under every relabelling.
    pub fn solutions(&self) -> Vec<Vec<C64>> {
        let perms = permutations(self.k);
        self.representatives
            .iter()
            .flat_map(|r| {
                let x = to_c(r);
                perms.iter().map(move |p| permute_point(&x, self.k, p)).collect::<Vec<_>>()
            })
            .collect()
    }

    pub fn solution_count(&self) -> usize {
        self.representatives.len() * permutations(self.k).len()
    }

    /// Constants `(−1, −m̂_1, …)` of the start instance.
    fn constants(&self) -> Vec<C64> {
        std::iter::once(C64::new(-1.0, 0.0))
            .chain(self.start_moments().into_iter().map(|m| -m))
            .collect()
    }
}

const BUNDLED_K3: &str = include_str!("../../data/general_k3_start.json");

/// Precomputed generic instance shipped with the crate, if any.
pub fn bundled_start(k: usize) -> Option<&'static GeneralStart> {
    static K3: OnceLock<Option<GeneralStart>> = OnceLock::new();
    match k {
        3 => K3
            .get_or_init(|| GeneralStart::from_json_str(BUNDLED_K3).ok().filter(|s| s.k == 3))
            .as_ref(),
        _ => None,
    }
}

pub(super) fn run_general(ms: &MomentSystem, settings: &TrackerSettings, options: &SolveOptions) -> Result<Vec<PathResult>> {
    let paths = total_degree(ms.k);
    if paths > DEFAULT_PATH_BUDGET && !options.allow_large {
        if let Some(start) = bundled_start(ms.k) {
            return Ok(track_from_instance(ms, start, settings));
        }
        return Err(Error::Unsupported(format!(
            "general system with k = {} needs {paths} paths; enable allow_large",
            ms.k
        )));
    }
    let start = total_degree_start(&ms.system)?;
    solve_system(&ms.system, &start, settings)
}

/// Parameter homotopy from the bundled instance to `ms`.
fn track_from_instance(ms: &MomentSystem, start: &GeneralStart, settings: &TrackerSettings) -> Vec<PathResult> {
    let body = CompiledSystem::new(&ms.system);
    let target = body.constants().to_vec();
    let h = ParameterHomotopy::new(&body, start.constants(), target);
    track_all(&h, &start.solutions(), settings)
}

/// Loops without a new orbit before [`complete_by_monodromy`] stops.
pub const MONODROMY_STALL: usize = 5;

/// Solves the general system at random complex moments by total degree,
/// keeps one representative per label-swap orbit, then looks for orbits
/// the total-degree pass missed with [`complete_by_monodromy`].
/// `progress` receives `(paths done, total)`.
pub fn precompute_general_start(
    k: usize,
    seed: u64,
    settings: &TrackerSettings,
    mut progress: impl FnMut(usize, usize),
) -> Result<GeneralStart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let moments: Vec<C64> = (0..3 * k - 1)
        .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
        .collect();
    let constants: Vec<C64> = std::iter::once(C64::new(-1.0, 0.0)).chain(moments.iter().map(|m| -m)).collect();
    let ms = build_system(ModelClass::General, k, &Knowns::none(), &MomentTable::univariate(&vec![0.5; 3 * k - 1]))?;
    let polys = ms.system.polys().iter().zip(&constants).map(|(p, &c)| p.with_constant(c)).collect();
    let target = PolySystem::with_names(polys, ms.system.var_names().to_vec())?;
    let start = total_degree_start(&target)?;
    let degrees = target.degrees();
    let total: usize = degrees.iter().map(|&d| d as usize).product();
    let h = ProjectiveHomotopy::new(&target, &start.system, settings)?;
    let mut reps: Vec<Vec<C64>> = Vec::new();
    let batch = 4096;
    let mut done = 0;
    while done < total {
        let end = (done + batch).min(total);
        let points: Vec<Vec<C64>> = (done..end).map(|i| total_degree_point(&degrees, i)).collect();
        let found = h.track(&points, settings).into_iter().filter(usable).map(|r| r.endpoint);
        add_orbits(&mut reps, k, found);
        done = end;
        progress(done, total);
    }
    let mut out = GeneralStart {
        k,
        moments: from_c(&moments),
        representatives: reps.iter().map(|r| from_c(r)).collect(),
    };
    complete_by_monodromy(&mut out, seed, settings, MONODROMY_STALL)?;
    Ok(out)
}

/// Endpoint acceptance for start data. The raw system at complex moments
/// is not standardized, so endpoints of size ~10 carry terms near 1e8
/// and can stall just above `final_tol`; a regular Jacobian is required
/// instead.
fn usable(r: &PathResult) -> bool {
    r.is_converged() || (r.t >= 1.0 && r.residual < START_RESIDUAL && r.condition < START_CONDITION)
}

const START_RESIDUAL: f64 = 1e-6;
const START_CONDITION: f64 = 1e12;

/// Constant-free general system for `k`; moments enter as constants.
fn general_body(k: usize) -> Result<CompiledSystem> {
    // placeholder real moments, replaced by whatever constants the caller sets
    let placeholder = MomentTable::univariate(&vec![0.5; 3 * k - 1]);
    let ms = build_system(ModelClass::General, k, &Knowns::none(), &placeholder)?;
    Ok(CompiledSystem::new(&ms.system))
}

/// Adds each point whose orbit is not yet in `reps`; returns how many.
fn add_orbits(reps: &mut Vec<Vec<C64>>, k: usize, points: impl IntoIterator<Item = Vec<C64>>) -> usize {
    let perms = permutations(k);
    let close = |a: &[C64], b: &[C64]| a.iter().zip(b).all(|(x, y)| (x - y).norm() <= 1e-6 * (1.0 + x.norm()));
    let mut added = 0;
    for x in points {
        if !reps.iter().any(|r| perms.iter().any(|p| close(&permute_point(r, k, p), &x))) {
            reps.push(x);
            added += 1;
        }
    }
    added
}

/// Carries the known representatives around random triangles in complex
/// moment space and back. Monodromy permutes the solution set, so orbits
/// the start missed show up as new endpoints. Stops after `stall`
/// consecutive loops add nothing; returns the number of orbits added.
pub fn complete_by_monodromy(start: &mut GeneralStart, seed: u64, settings: &TrackerSettings, stall: usize) -> Result<usize> {
    let k = start.k;
    let body = general_body(k)?;
    let c0 = start.constants();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(3);
    let mut random_constants = || -> Vec<C64> {
        std::iter::once(C64::new(-1.0, 0.0))
            .chain((1..c0.len()).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect()
    };
    let mut reps: Vec<Vec<C64>> = start.representatives.iter().map(|r| to_c(r)).collect();
    let mut added = 0;
    let mut quiet = 0;
    while quiet < stall && !reps.is_empty() {
        let (c1, c2) = (random_constants(), random_constants());
        let mut pts = reps.clone();
        for (a, b) in [(&c0, &c1), (&c1, &c2), (&c2, &c0)] {
            let h = ParameterHomotopy::new(&body, a.clone(), b.clone());
            pts = track_all(&h, &pts, settings).into_iter().filter(usable).map(|r| r.endpoint).collect();
        }
        let new = add_orbits(&mut reps, k, pts);
        added += new;
        quiet = if new == 0 { quiet + 1 } else { 0 };
    }
    sort_points(&mut reps);
    start.representatives = reps.iter().map(|r| from_c(r)).collect();
    Ok(added)
}

fn sort_points(v: &mut [Vec<C64>]) {
    v.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn monodromy_recovers_dropped_orbits() {
        let settings = TrackerSettings::default();
        let full = precompute_general_start(2, 9, &settings, |_, _| {}).unwrap();
        assert_eq!(full.solution_count(), 18);
        let mut partial = full.clone();
        partial.representatives.truncate(2);
        let added = complete_by_monodromy(&mut partial, 4, &settings, MONODROMY_STALL).unwrap();
        assert_eq!(added, 7);
        assert_eq!(partial.solution_count(), 18);
    }
}

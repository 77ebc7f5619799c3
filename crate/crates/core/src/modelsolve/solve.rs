use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::{binomial_start, solve_system, total_degree_start, PathResult, PathStats, TrackerSettings};
use crate::moments::{gaussian_moment, permutations, Knowns, MomentTable};
use crate::polysys::C64;

use super::class::ModelClass;
use super::general;
use super::system::{build_system, MomentSystem, Standardization};

/// Acceptance thresholds for solutions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Largest imaginary part of a real solution.
    pub imag_tol: f64,
    /// Smallest admissible variance.
    pub var_floor: f64,
    /// Two solutions closer than this (relative to coordinate size) are one.
    pub dedup_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            imag_tol: 1e-6,
            var_floor: 1e-8,
            dedup_tol: 1e-6,
        }
    }
}

/// Options for [`solve_class`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolveOptions {
    pub tolerances: Tolerances,
    /// Solve for standardized moments and map solutions back.
    pub standardize: bool,
    /// Permit path counts beyond the default budget.
    pub allow_large: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tolerances: Tolerances::default(),
            standardize: true,
            allow_large: false,
        }
    }
}

/// Largest total-degree path count run without `allow_large`.
pub const DEFAULT_PATH_BUDGET: u128 = 10_000;

/// One finite solution of a univariate moment system. Parameter values are
/// the real parts; `max_imag` records what was dropped.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivariateSolution {
    pub weights: Vec<f64>,
    pub means: Vec<f64>,
    pub vars: Vec<f64>,
    pub residual: f64,
    pub meaningful: bool,
    #[serde(default)]
    pub max_imag: f64,
    #[serde(skip)]
    pub complex: Option<ComplexParams>,
}

/// Complex parameter values of a solution.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexParams {
    pub weights: Vec<C64>,
    pub means: Vec<C64>,
    pub vars: Vec<C64>,
}

impl ComplexParams {
    fn component(&self, l: usize) -> [C64; 3] {
        [self.weights[l], self.means[l], self.vars[l]]
    }

    fn permuted(&self, p: &[usize]) -> Self {
        ComplexParams {
            weights: p.iter().map(|&i| self.weights[i]).collect(),
            means: p.iter().map(|&i| self.means[i]).collect(),
            vars: p.iter().map(|&i| self.vars[i]).collect(),
        }
    }
}

impl UnivariateSolution {
    pub fn from_complex(params: ComplexParams, residual: f64, weights_unknown: bool, tol: &Tolerances) -> Self {
        let max_imag = params
            .weights
            .iter()
            .chain(&params.means)
            .chain(&params.vars)
            .map(|z| z.im.abs())
            .fold(0.0, |m, a| if a.is_nan() { f64::INFINITY } else { m.max(a) });
        let re = |v: &[C64]| v.iter().map(|z| z.re).collect::<Vec<f64>>();
        let weights = re(&params.weights);
        let vars = re(&params.vars);
        let mut meaningful = max_imag < tol.imag_tol && vars.iter().all(|&v| v > tol.var_floor);
        if weights_unknown {
            let total: f64 = weights.iter().sum();
            meaningful &= weights.iter().all(|&w| w > 0.0) && (total - 1.0).abs() < tol.imag_tol.max(1e-9);
        }
        UnivariateSolution {
            weights,
            means: re(&params.means),
            vars,
            residual,
            meaningful,
            max_imag,
            complex: Some(params),
        }
    }

    pub fn k(&self) -> usize {
        self.means.len()
    }

    fn complex_or_real(&self) -> ComplexParams {
        self.complex.clone().unwrap_or_else(|| {
            let c = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect();
            ComplexParams {
                weights: c(&self.weights),
                means: c(&self.means),
                vars: c(&self.vars),
            }
        })
    }

    /// `Σ λ_ℓ M_i(µ_ℓ, σ_ℓ²)` at the (real) parameters.
    pub fn moment(&self, i: usize) -> f64 {
        (0..self.k())
            .map(|l| self.weights[l] * gaussian_moment(i, &self.means[l], &self.vars[l]))
            .sum()
    }

    /// Components relabelled by `p`.
    pub fn permuted(&self, p: &[usize]) -> Self {
        UnivariateSolution {
            weights: p.iter().map(|&i| self.weights[i]).collect(),
            means: p.iter().map(|&i| self.means[i]).collect(),
            vars: p.iter().map(|&i| self.vars[i]).collect(),
            residual: self.residual,
            meaningful: self.meaningful,
            max_imag: self.max_imag,
            complex: self.complex.as_ref().map(|c| c.permuted(p)),
        }
    }

    /// Sort key: sorted means, sorted variances, weights, then imaginary
    /// parts in the same arrangement.
    fn canonical_key(&self) -> Vec<f64> {
        let c = self.complex_or_real();
        let sorted = |v: &[C64]| {
            let mut s = v.to_vec();
            s.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
            s
        };
        let mut key = Vec::new();
        let parts = [sorted(&c.means), sorted(&c.vars), c.weights.clone()];
        key.extend(parts.iter().flatten().map(|z| z.re));
        key.extend(parts.iter().flatten().map(|z| z.im));
        key
    }

    /// Components ordered by mean, then variance.
    pub fn sorted_components(&self) -> Self {
        let c = self.complex_or_real();
        let mut idx: Vec<usize> = (0..self.k()).collect();
        idx.sort_by(|&a, &b| {
            let (x, y) = (c.component(a), c.component(b));
            x[1].re
                .total_cmp(&y[1].re)
                .then(x[2].re.total_cmp(&y[2].re))
                .then(x[1].im.total_cmp(&y[1].im))
                .then(x[2].im.total_cmp(&y[2].im))
                .then(x[0].re.total_cmp(&y[0].re))
        });
        self.permuted(&idx)
    }
}

/// Canonical order of solutions.
pub fn canonical_cmp(a: &UnivariateSolution, b: &UnivariateSolution) -> Ordering {
    let (ka, kb) = (a.canonical_key(), b.canonical_key());
    for (x, y) in ka.iter().zip(&kb) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    ka.len().cmp(&kb.len())
}

fn close(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm().max(y.norm())))
}

fn same_labelled(a: &ComplexParams, b: &ComplexParams, tol: f64) -> bool {
    close(&a.weights, &b.weights, tol) && close(&a.means, &b.means, tol) && close(&a.vars, &b.vars, tol)
}

fn same_up_to_swap(a: &ComplexParams, b: &ComplexParams, tol: f64) -> bool {
    permutations(a.means.len())
        .iter()
        .any(|p| same_labelled(a, &b.permuted(p), tol))
}

/// Drops repeated solutions (same labelled parameters within `tol`).
pub fn dedup_exact(solutions: Vec<UnivariateSolution>, tol: f64) -> Vec<UnivariateSolution> {
    let mut out: Vec<UnivariateSolution> = Vec::with_capacity(solutions.len());
    for s in solutions {
        let c = s.complex_or_real();
        match out.iter_mut().find(|o| same_labelled(&o.complex_or_real(), &c, tol)) {
            Some(o) if s.residual < o.residual => *o = s,
            Some(_) => {}
            None => out.push(s),
        }
    }
    out
}

/// One representative per label-swap orbit, components sorted by mean.
pub fn dedup_label_swap(solutions: Vec<UnivariateSolution>, tol: f64) -> Vec<UnivariateSolution> {
    let mut out: Vec<UnivariateSolution> = Vec::new();
    for s in solutions {
        let c = s.complex_or_real();
        match out.iter_mut().find(|o| same_up_to_swap(&o.complex_or_real(), &c, tol)) {
            Some(o) if s.residual < o.residual => *o = s.sorted_components(),
            Some(_) => {}
            None => out.push(s.sorted_components()),
        }
    }
    out.sort_by(canonical_cmp);
    out
}

/// Meaningful solutions only, realified.
pub fn filter_meaningful(solutions: &[UnivariateSolution]) -> Vec<UnivariateSolution> {
    solutions
        .iter()
        .filter(|s| s.meaningful)
        .map(|s| UnivariateSolution {
            complex: None,
            max_imag: 0.0,
            ..s.clone()
        })
        .collect()
}

/// Re-tags meaningfulness under other thresholds.
pub fn retag(solutions: &[UnivariateSolution], weights_unknown: bool, tol: &Tolerances) -> Vec<UnivariateSolution> {
    solutions
        .iter()
        .map(|s| UnivariateSolution::from_complex(s.complex_or_real(), s.residual, weights_unknown, tol))
        .collect()
}

/// Candidate whose predicted moments best match the given `(order, value)`
/// pairs: sum over pairs of `|predicted − value| / (1 + |value|)`. Ties go
/// to the first candidate in canonical order.
pub fn select_by_moments<'a>(candidates: &'a [UnivariateSolution], extra: &[(usize, f64)]) -> Result<&'a UnivariateSolution> {
    let mut order: Vec<&UnivariateSolution> = candidates.iter().collect();
    order.sort_by(|a, b| canonical_cmp(a, b));
    let score = |s: &UnivariateSolution| -> f64 {
        extra
            .iter()
            .map(|&(i, v)| (s.moment(i) - v).abs() / (1.0 + v.abs()))
            .sum()
    };
    let mut best: Option<(&UnivariateSolution, f64)> = None;
    for s in order {
        let sc = score(s);
        if best.is_none_or(|(_, b)| sc < b) {
            best = Some((s, sc));
        }
    }
    best.map(|(s, _)| s).ok_or(Error::NoCandidates)
}

/// [`select_by_moments`] with a single extra moment.
pub fn select_by_next_moment(candidates: &[UnivariateSolution], order: usize, value: f64) -> Result<&UnivariateSolution> {
    select_by_moments(candidates, &[(order, value)])
}

/// Output of [`solve_class`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ClassSolution {
    pub class: ModelClass,
    pub k: usize,
    pub solutions: Vec<UnivariateSolution>,
    #[serde(skip)]
    pub stats: PathStats,
}

impl ClassSolution {
    pub fn meaningful(&self) -> Vec<UnivariateSolution> {
        filter_meaningful(&self.solutions)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// The moment system as it is solved: standardized when requested.
pub fn prepared_system(
    class: ModelClass,
    k: usize,
    knowns: &Knowns,
    target: &MomentTable,
    options: &SolveOptions,
) -> Result<(MomentSystem, Standardization)> {
    let std = if options.standardize {
        Standardization::from_moments(target).unwrap_or(Standardization::IDENTITY)
    } else {
        Standardization::IDENTITY
    };
    let (knowns, target) = if std == Standardization::IDENTITY {
        (knowns.clone(), target.clone())
    } else {
        (std.knowns(knowns), std.moments(target)?)
    };
    Ok((build_system(class, k, &knowns, &target)?, std))
}

/// Tracks all paths for the class's start system and returns the
/// deduplicated finite solutions, with meaningful ones tagged.
pub fn solve_class(
    class: ModelClass,
    k: usize,
    knowns: &Knowns,
    target: &MomentTable,
    settings: &TrackerSettings,
    options: &SolveOptions,
) -> Result<ClassSolution> {
    let (ms, std) = prepared_system(class, k, knowns, target, options)?;
    let results = run_paths(&ms, settings, options)?;
    let stats = PathStats::from_results(&results);
    if stats.converged == 0 {
        return Err(Error::AllPathsFailed { paths: stats.paths });
    }
    let tol = &options.tolerances;
    let solutions: Vec<UnivariateSolution> = results
        .iter()
        .filter(|r| r.is_converged())
        .map(|r| {
            let (w, m, v) = ms.layout.unpack(&r.endpoint);
            let params = ComplexParams {
                weights: w,
                means: m.into_iter().map(|z| std.mean_back(z)).collect(),
                vars: v.into_iter().map(|z| std.var_back(z)).collect(),
            };
            UnivariateSolution::from_complex(params, r.residual, !class.weights_known(), tol)
        })
        .collect();
    let mut solutions = dedup_exact(solutions, tol.dedup_tol);
    solutions.sort_by(canonical_cmp);
    Ok(ClassSolution {
        class,
        k,
        solutions,
        stats,
    })
}

/// Number of paths [`solve_class`] tracks for a class.
pub fn class_path_count(class: ModelClass, k: usize) -> u128 {
    match class {
        ModelClass::LambdaWeighted | ModelClass::Homoscedastic => class.expected_solutions(k),
        ModelClass::KnownVarianceMeansOnly => (1..=k as u128).product(),
        ModelClass::General => general::path_count(k),
    }
}

fn run_paths(ms: &MomentSystem, settings: &TrackerSettings, options: &SolveOptions) -> Result<Vec<PathResult>> {
    match ms.class {
        ModelClass::LambdaWeighted | ModelClass::Homoscedastic => {
            let start = binomial_start(ms.class, ms.k, settings.seed)?;
            solve_system(&ms.system, &start, settings)
        }
        ModelClass::KnownVarianceMeansOnly => {
            let start = total_degree_start(&ms.system)?;
            solve_system(&ms.system, &start, settings)
        }
        ModelClass::General => general::run_general(ms, settings, options),
    }
}

use std::collections::BTreeMap;
use std::time::Instant;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::homotopy::with_workers;
use crate::modelsolve::{
    dedup_label_swap, filter_meaningful, select_by_moments, select_by_next_moment, solve_class, ModelClass,
    UnivariateSolution,
};
use crate::moments::{Knowns, MixtureParams, MomentKey, MomentTable};

use super::linear::{cross_covariance_system, solve_dense, uniform_mean_system};
use super::plan::{Pipeline, RecoveryOptions, RecoveryPlan};
use super::report::{moment_mismatch, RecoveryReport};

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn check_input(moments: &MomentTable, plan: &RecoveryPlan) -> Result<()> {
    if moments.dim() != plan.n {
        return Err(Error::DimensionMismatch {
            expected: plan.n,
            got: moments.dim(),
        });
    }
    for key in plan.required_moments() {
        moments.require(&key)?;
    }
    Ok(())
}

fn check_distinct_weights(weights: &[f64], gap: f64) -> Result<()> {
    for a in 0..weights.len() {
        for b in a + 1..weights.len() {
            if (weights[a] - weights[b]).abs() < gap {
                return Err(Error::Unsupported(format!(
                    "components {} and {} have equal weights ({:.6}); components cannot be matched across \
                     coordinates, use the uniform-weight pipeline",
                    a + 1,
                    b + 1,
                    weights[a]
                )));
            }
        }
    }
    Ok(())
}

struct CoordinateFit {
    solution: UnivariateSolution,
    paths: usize,
    ms: f64,
}

/// Steps 3 and 4 on coordinate `i`: λ-weighted solve with the shared
/// weights, then selection by `m_{(2k+1)eᵢ}`. The known-weight layout keeps
/// component `ℓ` tied to weight `λ_ℓ`, so labels agree across coordinates.
fn fit_coordinate(moments: &MomentTable, i: usize, weights: &[f64], options: &RecoveryOptions) -> Result<CoordinateFit> {
    let t = Instant::now();
    let k = weights.len();
    let k32 = k as u32;
    let target = moments.marginal(i, 2 * k32)?;
    let cs = solve_class(
        ModelClass::LambdaWeighted,
        k,
        &Knowns::weights(weights.to_vec()),
        &target,
        &options.tracker,
        &options.solve,
    )?;
    let candidates = filter_meaningful(&cs.solutions);
    if candidates.is_empty() {
        return Err(Error::NoMeaningfulSolution {
            stage: format!("step 3, coordinate {}", i + 1),
        });
    }
    let solution = select_by_next_moment(&candidates, 2 * k + 1, moments.axis(i, 2 * k32 + 1)?)?.clone();
    Ok(CoordinateFit {
        solution,
        paths: cs.stats.paths,
        ms: ms(t),
    })
}

/// Recovers weights, means and full covariances of a `k`-component mixture
/// in `n` dimensions from the moments listed by [`RecoveryPlan::algorithm1`].
pub fn algorithm1(moments: &MomentTable, k: usize, n: usize, options: &RecoveryOptions) -> Result<RecoveryReport> {
    options.tracker.validate()?;
    let plan = RecoveryPlan::algorithm1(k, n, options)?;
    check_input(moments, &plan)?;
    with_workers(options.tracker.workers, || run_algorithm1(moments, &plan, options))
}

fn run_algorithm1(moments: &MomentTable, plan: &RecoveryPlan, options: &RecoveryOptions) -> Result<RecoveryReport> {
    let start = Instant::now();
    let (k, n) = (plan.k, plan.n);
    let k32 = k as u32;
    let mut residuals = BTreeMap::new();
    let mut times = BTreeMap::new();
    let mut paths: u128 = 0;

    // Steps 1-2: weights and the first coordinate
    let mut fits: Vec<Option<UnivariateSolution>> = vec![None; n];
    let weights = match &options.known_weights {
        Some(w) => {
            if w.len() != k {
                return Err(Error::InvalidParams(format!("expected {k} known weights, got {}", w.len())));
            }
            w.clone()
        }
        None => {
            let t = Instant::now();
            let cs = solve_class(
                ModelClass::General,
                k,
                &Knowns::none(),
                &moments.marginal(0, 3 * k32 - 1)?,
                &options.tracker,
                &options.solve,
            )?;
            paths += cs.stats.paths as u128;
            let reps = dedup_label_swap(filter_meaningful(&cs.solutions), options.solve.tolerances.dedup_tol);
            if reps.is_empty() {
                return Err(Error::NoMeaningfulSolution { stage: "step 1".into() });
            }
            let extra = plan
                .selection_orders
                .iter()
                .map(|&c| Ok((c as usize, moments.axis(0, c)?)))
                .collect::<Result<Vec<_>>>()?;
            let mut chosen = select_by_moments(&reps, &extra)?.clone();
            let total: f64 = chosen.weights.iter().sum();
            chosen.weights.iter_mut().for_each(|w| *w /= total);
            residuals.insert("step1".to_string(), chosen.residual);
            times.insert("step1".to_string(), ms(t));
            let w = chosen.weights.clone();
            fits[0] = Some(chosen);
            w
        }
    };
    check_distinct_weights(&weights, options.weight_gap)?;

    // Steps 3-4: remaining coordinates, independently
    let t = Instant::now();
    let first = if plan.step1 { 1 } else { 0 };
    let coordinate: Vec<CoordinateFit> = (first..n)
        .into_par_iter()
        .map(|i| fit_coordinate(moments, i, &weights, options))
        .collect::<Result<_>>()?;
    let mut coordinate_times = Vec::with_capacity(coordinate.len());
    let mut step3_residual = 0.0f64;
    for (i, fit) in (first..n).zip(coordinate) {
        paths += fit.paths as u128;
        coordinate_times.push(fit.ms);
        step3_residual = step3_residual.max(fit.solution.residual);
        fits[i] = Some(fit.solution);
    }
    if first < n {
        residuals.insert("step3".to_string(), step3_residual);
        times.insert("step3".to_string(), ms(t));
    }
    let fits: Vec<UnivariateSolution> = fits.into_iter().map(|f| f.expect("every coordinate fitted")).collect();

    let mut means = vec![vec![0.0; n]; k];
    let mut covariances = vec![vec![vec![0.0; n]; n]; k];
    for (i, fit) in fits.iter().enumerate() {
        for l in 0..k {
            means[l][i] = fit.means[l];
            covariances[l][i][i] = fit.vars[l];
        }
    }

    // Step 5: off-diagonal covariances, one k x k system per pair
    let t = Instant::now();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let solved = pairs
        .par_iter()
        .map(|&(i, j)| {
            let rhs = (1..=k32)
                .map(|c| moments.require(&MomentKey::cross(n, i, c, j)))
                .collect::<Result<Vec<_>>>()?;
            let (a, b) = cross_covariance_system(&weights, &fits[i].means, &fits[i].vars, &fits[j].means, &rhs);
            solve_dense(a, b, options.max_condition, &format!("step 5, pair ({}, {})", i + 1, j + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_condition = 0.0f64;
    let mut step5_residual = 0.0f64;
    for (&(i, j), s) in pairs.iter().zip(&solved) {
        max_condition = max_condition.max(s.condition);
        step5_residual = step5_residual.max(s.residual);
        for l in 0..k {
            covariances[l][i][j] = s.x[l];
            covariances[l][j][i] = s.x[l];
        }
    }
    if !pairs.is_empty() {
        residuals.insert("step5".to_string(), step5_residual);
        times.insert("step5".to_string(), ms(t));
    }

    let params = MixtureParams {
        k,
        n,
        weights,
        means,
        covariances,
    };
    residuals.insert(
        "moments".to_string(),
        moment_mismatch(&params, moments, &plan.required_moments())?,
    );
    debug_assert_eq!(paths, plan.path_budget);
    Ok(RecoveryReport {
        pipeline: Pipeline::Algorithm1,
        params,
        paths_tracked: paths,
        wall_time_ms: ms(start),
        stage_residuals: residuals,
        stage_times_ms: times,
        coordinate_times_ms: coordinate_times,
        max_condition,
        normalized_error: None,
    })
}

/// Recovers the means of a uniform mixture whose components share the
/// known covariance `known_cov`.
pub fn algorithm2(
    moments: &MomentTable,
    k: usize,
    n: usize,
    known_cov: &[Vec<f64>],
    options: &RecoveryOptions,
) -> Result<RecoveryReport> {
    options.tracker.validate()?;
    let plan = RecoveryPlan::algorithm2(k, n)?;
    check_input(moments, &plan)?;
    if known_cov.len() != n || known_cov.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidParams(format!("known covariance must be {n}x{n}")));
    }
    let m = DMatrix::from_fn(n, n, |r, c| known_cov[r][c]);
    if (&m - m.transpose()).amax() > 1e-12 * m.amax().max(1.0) || m.clone().cholesky().is_none() {
        return Err(Error::InvalidParams("known covariance must be symmetric positive definite".into()));
    }
    with_workers(options.tracker.workers, || run_algorithm2(moments, &plan, known_cov, options))
}

fn run_algorithm2(
    moments: &MomentTable,
    plan: &RecoveryPlan,
    known_cov: &[Vec<f64>],
    options: &RecoveryOptions,
) -> Result<RecoveryReport> {
    let start = Instant::now();
    let (k, n) = (plan.k, plan.n);
    let weights = vec![1.0 / k as f64; k];
    let mut residuals = BTreeMap::new();
    let mut times = BTreeMap::new();

    // Step 1: means on coordinate 1
    let t = Instant::now();
    let knowns = Knowns {
        weights: Some(weights.clone()),
        vars: Some(vec![known_cov[0][0]; k]),
        ..Knowns::none()
    };
    let cs = solve_class(
        ModelClass::KnownVarianceMeansOnly,
        k,
        &knowns,
        &moments.marginal(0, k as u32)?,
        &options.tracker,
        &options.solve,
    )?;
    let paths = cs.stats.paths as u128;
    let reps = dedup_label_swap(filter_meaningful(&cs.solutions), options.solve.tolerances.dedup_tol);
    let first = reps
        .into_iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .ok_or_else(|| Error::NoMeaningfulSolution { stage: "step 1".into() })?;
    residuals.insert("step1".to_string(), first.residual);
    times.insert("step1".to_string(), ms(t));

    // Step 2: remaining coordinates, one k x k system each
    let t = Instant::now();
    let solved = (1..n)
        .into_par_iter()
        .map(|i| {
            let rhs = (0..k as u32)
                .map(|c| {
                    let key = if c == 0 {
                        MomentKey::axis(n, i, 1)
                    } else {
                        MomentKey::cross(n, 0, c, i)
                    };
                    moments.require(&key)
                })
                .collect::<Result<Vec<_>>>()?;
            let (a, b) = uniform_mean_system(&first.means, known_cov[0][0], known_cov[0][i], &rhs);
            solve_dense(a, b, options.max_condition, &format!("step 2, coordinate {}", i + 1))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut means: Vec<Vec<f64>> = first.means.iter().map(|&m| vec![m; 1]).collect();
    let mut max_condition = 0.0f64;
    let mut step2_residual = 0.0f64;
    for s in &solved {
        max_condition = max_condition.max(s.condition);
        step2_residual = step2_residual.max(s.residual);
        for l in 0..k {
            means[l].push(s.x[l]);
        }
    }
    if n > 1 {
        residuals.insert("step2".to_string(), step2_residual);
        times.insert("step2".to_string(), ms(t));
    }

    let params = MixtureParams {
        k,
        n,
        weights,
        means,
        covariances: vec![known_cov.to_vec(); k],
    };
    residuals.insert(
        "moments".to_string(),
        moment_mismatch(&params, moments, &plan.required_moments())?,
    );
    debug_assert_eq!(paths, plan.path_budget);
    Ok(RecoveryReport {
        pipeline: Pipeline::Algorithm2,
        params,
        paths_tracked: paths,
        wall_time_ms: ms(start),
        stage_residuals: residuals,
        stage_times_ms: times,
        coordinate_times_ms: Vec::new(),
        max_condition,
        normalized_error: None,
    })
}

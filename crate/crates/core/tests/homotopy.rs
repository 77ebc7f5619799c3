use gmm_moments::homotopy::{
    binomial_start, solve_system, total_degree_start, track_path, PathResult, PathStatus, TrackerSettings,
};
use gmm_moments::modelsolve::{build_system, ModelClass, MomentSystem};
use gmm_moments::moments::{exact_moments, Knowns, MixtureParams, MomentKey};
use gmm_moments::polysys::{PolySystem, SparsePoly, C64};

fn lambda_weighted_target(weights: &[f64], means: &[f64], vars: &[f64]) -> MomentSystem {
    let p = MixtureParams::univariate(weights.to_vec(), means.to_vec(), vars.to_vec()).unwrap();
    let k = weights.len();
    let keys: Vec<MomentKey> = (1..=2 * k as u32).map(|c| MomentKey::new(vec![c])).collect();
    let t = exact_moments(&p, &keys).unwrap();
    build_system(ModelClass::LambdaWeighted, k, &Knowns::weights(weights.to_vec()), &t).unwrap()
}

fn converged(results: &[PathResult]) -> Vec<Vec<C64>> {
    let mut v: Vec<Vec<C64>> = results
        .iter()
        .filter(|r| r.status == PathStatus::Converged)
        .map(|r| r.endpoint.clone())
        .collect();
    v.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    v
}

fn distinct(points: Vec<Vec<C64>>, tol: f64) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = Vec::new();
    for p in points {
        if !out.iter().any(|q| same(q, &p, tol)) {
            out.push(p);
        }
    }
    out
}

fn same(a: &[C64], b: &[C64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol * (1.0 + x.norm()))
}

fn same_sets(a: &[Vec<C64>], b: &[Vec<C64>], tol: f64) -> bool {
    a.len() == b.len() && a.iter().all(|p| b.iter().any(|q| same(p, q, tol)))
}

#[test]
fn endpoints_do_not_depend_on_gamma() {
    let ms = lambda_weighted_target(&[0.3, 0.7], &[-0.4, 0.9], &[0.8, 1.3]);
    let mut sets = Vec::new();
    for seed in [1u64, 7, 19, 123, 4096] {
        let settings = TrackerSettings::with_seed(seed);
        let start = binomial_start(ModelClass::LambdaWeighted, 2, seed).unwrap();
        let r = solve_system(&ms.system, &start, &settings).unwrap();
        for p in r.iter().filter(|p| p.is_converged()) {
            assert!(p.residual < settings.final_tol);
        }
        sets.push(converged(&r));
    }
    assert_eq!(sets[0].len(), 6);
    for s in &sets[1..] {
        assert!(same_sets(&sets[0], s, 1e-8));
    }
}

#[test]
fn total_degree_and_binomial_agree() {
    let ms = lambda_weighted_target(&[0.45, 0.55], &[0.2, -0.7], &[0.5, 1.1]);
    let settings = TrackerSettings::default();
    let td = total_degree_start(&ms.system).unwrap();
    assert_eq!(td.points.len(), 24);
    let bin = binomial_start(ModelClass::LambdaWeighted, 2, 5).unwrap();
    assert_eq!(bin.points.len(), 6);
    let a = distinct(converged(&solve_system(&ms.system, &td, &settings).unwrap()), 1e-8);
    let b = converged(&solve_system(&ms.system, &bin, &settings).unwrap());
    assert_eq!(b.len(), 6);
    assert!(same_sets(&a, &b, 1e-8));
}

#[test]
fn binomial_endpoints_contain_the_truth() {
    // (µ₁, σ₁², µ₂, σ₂²) ordering of the λ-weighted layout
    let ms = lambda_weighted_target(&[0.5, 0.5], &[1.0, -1.5], &[0.7, 2.0]);
    let r = solve_system(&ms.system, &binomial_start(ModelClass::LambdaWeighted, 2, 0).unwrap(), &TrackerSettings::default()).unwrap();
    let ends = converged(&r);
    assert_eq!(ends.len(), 6);
    let c = |v: &[f64]| v.iter().map(|&x| C64::new(x, 0.0)).collect::<Vec<_>>();
    for truth in [c(&[1.0, 0.7, -1.5, 2.0]), c(&[-1.5, 2.0, 1.0, 0.7])] {
        assert!(ends.iter().any(|e| same(e, &truth, 1e-8)));
    }
}

#[test]
fn identity_homotopy_stays_put() {
    let x = SparsePoly::variable(2, 0);
    let y = SparsePoly::variable(2, 1);
    let f = PolySystem::new(vec![&(&x * &x) - &y.scale(2.0), &(&y * &y) - &SparsePoly::constant(2, 9.0)]).unwrap();
    let s = C64::new(6.0f64.sqrt(), 0.0);
    let point = vec![s, C64::new(3.0, 0.0)];
    let r = track_path(&f, &f, &point, &TrackerSettings::default()).unwrap();
    assert!(r.is_converged());
    assert!(r.steps_taken >= 1);
    assert!(same(&r.endpoint, &point, 1e-12));
}

#[test]
fn linear_one_variable() {
    let x = SparsePoly::variable(1, 0);
    let g = PolySystem::new(vec![&x - &SparsePoly::constant(1, 1.0)]).unwrap();
    let f = PolySystem::new(vec![&x.scale(3.0) + &SparsePoly::constant(1, 2.0)]).unwrap();
    for seed in 0..5 {
        let r = track_path(&g, &f, &[C64::new(1.0, 0.0)], &TrackerSettings::with_seed(seed)).unwrap();
        assert!(r.is_converged());
        assert!((r.endpoint[0] - C64::new(-2.0 / 3.0, 0.0)).norm() < 1e-12);
    }
}

#[test]
fn total_degree_paths_to_infinity_diverge() {
    // xy = 1, x = 2 has one finite root; the second path runs off to infinity
    let x = SparsePoly::variable(2, 0);
    let y = SparsePoly::variable(2, 1);
    let f = PolySystem::new(vec![&(&x * &y) - &SparsePoly::constant(2, 1.0), &x - &SparsePoly::constant(2, 2.0)]).unwrap();
    let start = total_degree_start(&f).unwrap();
    assert_eq!(start.points.len(), 2);
    let r = solve_system(&f, &start, &TrackerSettings::default()).unwrap();
    let ends = converged(&r);
    assert_eq!(ends.len(), 1);
    assert!(same(&ends[0], &[C64::new(2.0, 0.0), C64::new(0.5, 0.0)], 1e-12));
    assert!(r.iter().any(|p| p.status == PathStatus::Diverged));
}

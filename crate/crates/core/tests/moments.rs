use gmm_moments::moments::{
    exact_moments, gaussian_moment, gaussian_multi_moment, mixture_moment_poly, multivariate_moment_poly, sample_moments,
    Knowns, MixtureParams, MomentKey, Samples,
};
use gmm_moments::polysys::SparsePoly;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn worked_model() -> MixtureParams {
    MixtureParams::new(
        vec![0.25, 0.75],
        vec![vec![-1.0, -2.0], vec![0.0, 4.0]],
        vec![vec![vec![1.0, 0.5], vec![0.5, 2.0]], vec![vec![3.0, 0.25], vec![0.25, 3.5]]],
    )
    .unwrap()
}

#[test]
fn derivative_identities_symbolic() {
    let mu = SparsePoly::variable(2, 0);
    let s = SparsePoly::variable(2, 1);
    let m: Vec<SparsePoly> = (0..=10).map(|i| gaussian_moment(i, &mu, &s)).collect();
    for i in 1..=10usize {
        let d_mu = &m[i].derivative(0) - &m[i - 1].scale(i as f64);
        assert!(d_mu.is_zero(), "d/dmu M_{i}");
        let lower = if i >= 2 { m[i - 2].scale((i * (i - 1) / 2) as f64) } else { SparsePoly::zero(2) };
        let d_s = &m[i].derivative(1) - &lower;
        assert!(d_s.is_zero(), "d/ds M_{i}");
    }
}

#[test]
fn derivative_identities_numeric() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let mu: f64 = rng.random_range(-2.0..2.0);
        let s: f64 = rng.random_range(0.2..3.0);
        let h = 1e-6;
        for i in 1..=10usize {
            let fd_mu = (gaussian_moment(i, &(mu + h), &s) - gaussian_moment(i, &(mu - h), &s)) / (2.0 * h);
            let want = i as f64 * gaussian_moment(i - 1, &mu, &s);
            assert!((fd_mu - want).abs() <= 1e-6 * (1.0 + want.abs()), "mu, i={i}");
            let fd_s = (gaussian_moment(i, &mu, &(s + h)) - gaussian_moment(i, &mu, &(s - h))) / (2.0 * h);
            let want = if i >= 2 { (i * (i - 1) / 2) as f64 * gaussian_moment(i - 2, &mu, &s) } else { 0.0 };
            assert!((fd_s - want).abs() <= 1e-6 * (1.0 + want.abs()), "s, i={i}");
        }
    }
}

#[test]
fn one_dimensional_mgf_matches_univariate_polys() {
    for k in 1..=4usize {
        for i in 1..=(3 * k + 1) {
            let multi = multivariate_moment_poly(&MomentKey::new(vec![i as u32]), k, &[]).unwrap();
            let uni = mixture_moment_poly(i, k, &Knowns::none()).unwrap();
            assert!((&multi - &uni).max_abs_coefficient() < 1e-9 * (1.0 + uni.max_abs_coefficient()), "k={k} i={i}");
        }
    }
}

#[test]
fn worked_model_moments() {
    let p = worked_model();
    let expect = [
        (vec![1, 0], -0.25),
        (vec![2, 0], 2.75),
        (vec![3, 0], -1.0),
        (vec![4, 0], 22.75),
        (vec![5, 0], -6.5),
        (vec![6, 0], 322.75),
        (vec![0, 1], 2.5),
        (vec![0, 2], 16.125),
        (vec![0, 3], 74.5),
        (vec![0, 4], 490.5625),
        (vec![0, 5], 2921.25),
        (vec![1, 1], 0.8125),
        (vec![2, 1], 7.75),
    ];
    let keys: Vec<MomentKey> = expect.iter().map(|(k, _)| MomentKey::new(k.clone())).collect();
    let t = exact_moments(&p, &keys).unwrap();
    for (key, v) in keys.iter().zip(expect.iter().map(|e| e.1)) {
        assert!((t.get(key).unwrap() - v).abs() < 1e-12, "{key}");
    }
}

#[test]
fn sample_moments_converge() {
    let p = worked_model();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let chol: Vec<DMatrix<f64>> = p
        .covariances
        .iter()
        .map(|s| DMatrix::from_fn(2, 2, |r, c| s[r][c]).cholesky().unwrap().l())
        .collect();
    let n = 1_000_000;
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let u: f64 = rng.random();
        let l = if u < p.weights[0] { 0 } else { 1 };
        let z = DVector::from_fn(2, |_, _| rng.sample::<f64, _>(StandardNormal));
        let x = &chol[l] * z;
        rows.push(vec![x[0] + p.means[l][0], x[1] + p.means[l][1]]);
    }
    let samples = Samples::from_rows(&rows).unwrap();
    let keys: Vec<MomentKey> = [[1, 0], [0, 1], [2, 0], [1, 1], [0, 2]]
        .iter()
        .map(|k| MomentKey::new(k.to_vec()))
        .collect();
    let got = sample_moments(&samples, &keys).unwrap();
    let want = exact_moments(&p, &keys).unwrap();
    for key in &keys {
        let (g, w) = (got.get(key).unwrap(), want.get(key).unwrap());
        assert!((g - w).abs() < 5e-2, "{key}: {g} vs {w}");
    }
}

proptest! {
    #[test]
    fn diagonal_gaussian_moments_factorise(
        mu in prop::collection::vec(-2.0f64..2.0, 3),
        var in prop::collection::vec(0.1f64..3.0, 3),
        idx in prop::collection::vec(0u32..=3, 3),
    ) {
        let cov: Vec<Vec<f64>> = (0..3).map(|r| (0..3).map(|c| if r == c { var[r] } else { 0.0 }).collect()).collect();
        let got = gaussian_multi_moment(&MomentKey::new(idx.clone()), &mu, &cov);
        let want: f64 = (0..3).map(|s| gaussian_moment(idx[s] as usize, &mu[s], &var[s])).product();
        prop_assert!((got - want).abs() <= 1e-10 * (1.0 + want.abs()));
    }

    #[test]
    fn gaussian_recursion_holds(mu in -3.0f64..3.0, s in 0.05f64..4.0) {
        let m: Vec<f64> = (0..=12).map(|i| gaussian_moment(i, &mu, &s)).collect();
        prop_assert_eq!(m[0], 1.0);
        prop_assert!((m[1] - mu).abs() < 1e-15);
        for i in 2..=12 {
            let r = mu * m[i - 1] + (i - 1) as f64 * s * m[i - 2];
            prop_assert!((m[i] - r).abs() <= 1e-12 * (1.0 + r.abs()));
        }
    }
}

use gmm_moments::moments::{exact_moments, MixtureParams, MomentKey, MomentTable};
use gmm_moments::recover::{
    algorithm1, algorithm2, cross_covariance_system, path_count, solve_dense, RecoveryOptions, RecoveryPlan,
    RecoveryReport,
};
use gmm_moments::Error;

fn worked_moments() -> MomentTable {
    let mut m = MomentTable::new(2);
    for (c, v) in [-0.25, 2.75, -1.0, 22.75, -6.5, 322.75].into_iter().enumerate() {
        m.insert(MomentKey::axis(2, 0, c as u32 + 1), v).unwrap();
    }
    for (c, v) in [2.5, 16.125, 74.5, 490.5625, 2921.25].into_iter().enumerate() {
        m.insert(MomentKey::axis(2, 1, c as u32 + 1), v).unwrap();
    }
    m.insert(MomentKey::new(vec![1, 1]), 0.8125).unwrap();
    m.insert(MomentKey::new(vec![2, 1]), 7.75).unwrap();
    m
}

fn run1(truth: &MixtureParams, opts: &RecoveryOptions) -> RecoveryReport {
    let plan = RecoveryPlan::algorithm1(truth.k, truth.n, opts).unwrap();
    let m = exact_moments(truth, &plan.required_moments()).unwrap();
    let r = algorithm1(&m, truth.k, truth.n, opts).unwrap().with_truth(truth);
    assert_eq!(r.paths_tracked, path_count(&plan));
    r
}

#[test]
fn worked_example_end_to_end() {
    let opts = RecoveryOptions::default();
    let r = algorithm1(&worked_moments(), 2, 2, &opts).unwrap();
    let truth = MixtureParams::new(
        vec![0.25, 0.75],
        vec![vec![-1.0, -2.0], vec![0.0, 4.0]],
        vec![vec![vec![1.0, 0.5], vec![0.5, 2.0]], vec![vec![3.0, 0.25], vec![0.25, 3.5]]],
    )
    .unwrap();
    let got = r.params.parameter_vector(false);
    let want = truth.parameter_vector(false);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-6, "{got:?}");
    }
    assert_eq!(r.paths_tracked, 726);
    assert!(r.stage_residuals["moments"] < 1e-8);
    let back: serde_json::Value = serde_json::from_str(&r.to_json_string().unwrap()).unwrap();
    for field in ["paths_tracked", "wall_time_ms", "stage_residuals"] {
        assert!(back.get(field).is_some());
    }
}

#[test]
fn full_covariance_round_trip() {
    let truth = MixtureParams::new(
        vec![0.4, 0.6],
        vec![vec![0.5, -1.0, 2.0], vec![-1.5, 1.0, 0.0]],
        vec![
            vec![vec![1.0, 0.3, -0.2], vec![0.3, 2.0, 0.4], vec![-0.2, 0.4, 1.5]],
            vec![vec![2.0, -0.5, 0.1], vec![-0.5, 1.0, 0.2], vec![0.1, 0.2, 0.8]],
        ],
    )
    .unwrap();
    let r = run1(&truth, &RecoveryOptions::default());
    assert!(r.normalized_error.unwrap() < 1e-8);
    assert!(r.params.is_meaningful());
    for v in r.stage_residuals.values() {
        assert!(*v < 1e-8);
    }
}

#[test]
fn single_component_is_mean_and_covariance() {
    let cov = vec![vec![2.0, 0.4, 0.0], vec![0.4, 1.0, -0.3], vec![0.0, -0.3, 0.7]];
    let truth = MixtureParams::new(vec![1.0], vec![vec![1.0, -2.0, 0.5]], vec![cov]).unwrap();
    let r = run1(&truth, &RecoveryOptions::default());
    assert!(r.normalized_error.unwrap() < 1e-10);
    assert_eq!(r.paths_tracked, 6 + 2);
}

#[test]
fn known_weights_skip_the_general_stage() {
    let truth = MixtureParams::diagonal(
        vec![0.2, 0.8],
        vec![vec![1.0, -1.0, 0.0, 2.0], vec![-1.0, 2.0, 1.5, -0.5]],
        vec![vec![0.7, 1.2, 2.0, 0.9], vec![1.5, 0.6, 1.1, 2.2]],
    )
    .unwrap();
    let opts = RecoveryOptions {
        known_weights: Some(vec![0.2, 0.8]),
        ..RecoveryOptions::default()
    };
    let r = run1(&truth, &opts);
    assert_eq!(r.paths_tracked, 6 * 4);
    assert!(r.normalized_error.unwrap() < 1e-10);
    assert!(!r.stage_residuals.contains_key("step1"));
}

#[test]
fn coordinate_order_does_not_matter() {
    let truth = MixtureParams::diagonal(
        vec![0.3, 0.7],
        vec![vec![0.0, 1.0, -2.0, 0.5], vec![1.0, -1.0, 1.0, 2.5]],
        vec![vec![1.0, 0.8, 1.4, 2.0], vec![2.0, 1.5, 0.6, 1.0]],
    )
    .unwrap();
    let perm = [0usize, 3, 1, 2];
    let moved = MixtureParams::diagonal(
        truth.weights.clone(),
        truth.means.iter().map(|m| perm.iter().map(|&s| m[s]).collect()).collect(),
        (0..2).map(|l| perm.iter().map(|&s| truth.var(l, s)).collect()).collect(),
    )
    .unwrap();
    let opts = RecoveryOptions::default();
    let a = run1(&truth, &opts).params;
    let b = run1(&moved, &opts).params;
    for l in 0..2 {
        for (new, &old) in perm.iter().enumerate() {
            assert!((b.means[l][new] - a.means[l][old]).abs() < 1e-10);
            assert!((b.covariances[l][new][new] - a.covariances[l][old][old]).abs() < 1e-10);
        }
    }
}

#[test]
fn extended_selection_recovers_the_model() {
    let truth = MixtureParams::diagonal(
        vec![0.25, 0.75],
        vec![vec![-1.0, 0.5], vec![0.0, -0.5]],
        vec![vec![1.0, 0.5], vec![3.0, 1.0]],
    )
    .unwrap();
    let opts = RecoveryOptions {
        extended_selection: true,
        ..RecoveryOptions::default()
    };
    assert!(run1(&truth, &opts).normalized_error.unwrap() < 1e-8);
}

#[test]
fn repeated_coordinate_means_make_step5_singular() {
    // equal means on coordinate i leave the σ_{ℓij} columns dependent
    let (a, b) = cross_covariance_system(&[0.3, 0.7], &[0.5, 0.5], &[1.0, 2.0], &[1.0, -1.0], &[0.2, 0.4]);
    assert!(matches!(
        solve_dense(a, b, 1e12, "step 5"),
        Err(Error::SingularLinearSystem { .. })
    ));
}

#[test]
fn algorithm2_three_components() {
    let cov = vec![vec![1.0, 0.2, -0.1], vec![0.2, 0.8, 0.0], vec![-0.1, 0.0, 1.5]];
    let truth = MixtureParams::new(
        vec![1.0 / 3.0; 3],
        vec![vec![-2.0, 0.0, 1.0], vec![0.5, 1.5, -1.0], vec![2.5, -1.0, 0.0]],
        vec![cov.clone(); 3],
    )
    .unwrap();
    let plan = RecoveryPlan::algorithm2(3, 3).unwrap();
    let m = exact_moments(&truth, &plan.required_moments()).unwrap();
    let r = algorithm2(&m, 3, 3, &cov, &RecoveryOptions::default()).unwrap().with_truth(&truth);
    assert_eq!(r.paths_tracked, 6);
    assert!(r.normalized_error.unwrap() < 1e-8);
}

#[test]
fn algorithm2_rejects_indefinite_covariance() {
    let cov = vec![vec![1.0, 2.0], vec![2.0, 1.0]];
    let m = MomentTable::new(2);
    let plan = RecoveryPlan::algorithm2(1, 2).unwrap();
    let mut t = m.clone();
    for key in plan.required_moments() {
        t.insert(key, 0.5).unwrap();
    }
    assert!(matches!(
        algorithm2(&t, 1, 2, &cov, &RecoveryOptions::default()),
        Err(Error::InvalidParams(_))
    ));
}

#[test]
fn three_components_round_trip() {
    let truth = MixtureParams::diagonal(
        vec![0.25, 0.35, 0.4],
        vec![vec![-2.0, 1.0, 0.0], vec![0.5, -1.0, 2.0], vec![2.0, 0.5, -1.5]],
        vec![vec![1.0, 0.7, 1.2], vec![0.6, 1.4, 0.9], vec![1.3, 0.8, 0.5]],
    )
    .unwrap();
    let r = run1(&truth, &RecoveryOptions::default());
    assert_eq!(r.paths_tracked, 1350 + 2 * 90);
    assert!(r.normalized_error.unwrap() < 1e-8);
}

use gmm_moments::homotopy::binomial_segments;
use gmm_moments::modelsolve::ModelClass;
use gmm_moments::polysys::{
    bezout_bound, evaluate, jacobian, segment_mixed_volume, LineSegmentSupport, PolySystem, SparsePoly, C64,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_poly(rng: &mut ChaCha8Rng, nvars: usize, terms: usize, max_deg: u8) -> SparsePoly {
    let mut p = SparsePoly::zero(nvars);
    for _ in 0..terms {
        let mut t = SparsePoly::constant(nvars, C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        for v in 0..nvars {
            let d = rng.random_range(0..=max_deg);
            if d > 0 {
                t = &t * &SparsePoly::monomial_in(nvars, v, d, 1.0);
            }
        }
        p += &t;
    }
    p
}

fn random_point(rng: &mut ChaCha8Rng, n: usize) -> Vec<C64> {
    (0..n)
        .map(|_| C64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)))
        .collect()
}

#[test]
fn jacobian_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.random_range(1..=4);
        let polys: Vec<SparsePoly> = (0..n).map(|_| random_poly(&mut rng, n, 5, 4)).collect();
        let sys = PolySystem::new(polys).unwrap();
        let x = random_point(&mut rng, n);
        let jac = jacobian(&sys, &x).unwrap();
        let h = 1e-6;
        for j in 0..n {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let fp = sys.evaluate(&xp).unwrap();
            let fm = sys.evaluate(&xm).unwrap();
            for i in 0..n {
                let fd = (fp[i] - fm[i]) / (2.0 * h);
                let err = (fd - jac[(i, j)]).norm() / (1.0 + jac[(i, j)].norm());
                assert!(err < 1e-6, "entry ({i},{j}): {} vs {}", fd, jac[(i, j)]);
            }
        }
    }
}

#[test]
fn bezout_of_lambda_weighted_and_means_only() {
    use gmm_moments::modelsolve::build_system;
    use gmm_moments::moments::{Knowns, MomentTable};
    let t = MomentTable::univariate(&[0.3, 1.2, 0.7, 3.1]);
    let lw = build_system(ModelClass::LambdaWeighted, 2, &Knowns::weights(vec![0.4, 0.6]), &t).unwrap();
    assert_eq!(bezout_bound(&lw.system), 24);
    let k = Knowns {
        weights: Some(vec![1.0 / 3.0; 3]),
        vars: Some(vec![1.0; 3]),
        ..Knowns::none()
    };
    let mo = build_system(ModelClass::KnownVarianceMeansOnly, 3, &k, &MomentTable::univariate(&[0.3, 1.2, 0.7])).unwrap();
    assert_eq!(bezout_bound(&mo.system), 6);
}

fn double_factorial_odd(m: u128) -> u128 {
    (1..=m).filter(|v| v % 2 == 1).product()
}

fn factorial(m: u128) -> u128 {
    (1..=m).product()
}

#[test]
fn binomial_mixed_volumes_match_closed_forms() {
    for k in 1..=6usize {
        let lw = segment_mixed_volume(&binomial_segments(ModelClass::LambdaWeighted, k).unwrap()).unwrap();
        assert_eq!(lw, double_factorial_odd(2 * k as u128 - 1) * factorial(k as u128), "k={k}");
        let ho = segment_mixed_volume(&binomial_segments(ModelClass::Homoscedastic, k).unwrap()).unwrap();
        assert_eq!(ho, factorial(k as u128 + 1) / 2, "k={k}");
    }
}

fn segments_strategy() -> impl Strategy<Value = Vec<Vec<i64>>> {
    (1usize..=4).prop_flat_map(|n| prop::collection::vec(prop::collection::vec(-4i64..=4, n), n))
}

/// Random unimodular matrix: a product of elementary integer row operations.
fn unimodular(n: usize, ops: &[(usize, usize, i64)]) -> Vec<Vec<i64>> {
    let mut u: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect();
    for &(a, b, c) in ops {
        let (a, b) = (a % n, b % n);
        if a != b {
            for j in 0..n {
                u[a][j] += c * u[b][j];
            }
        }
    }
    u
}

proptest! {
    #[test]
    fn evaluation_is_linear(seed in any::<u64>(), a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=4);
        let f = random_poly(&mut rng, n, 6, 5);
        let g = random_poly(&mut rng, n, 6, 5);
        let x = random_point(&mut rng, n);
        let lhs = evaluate(&(&f.scale(a) + &g.scale(b)), &x).unwrap();
        let rhs = evaluate(&f, &x).unwrap() * a + evaluate(&g, &x).unwrap() * b;
        let scale = 1.0 + f.term_magnitude(&x) * a.abs() + g.term_magnitude(&x) * b.abs();
        prop_assert!((lhs - rhs).norm() <= 1e-13 * scale);
    }

    #[test]
    fn mixed_volume_ignores_segment_order(v in segments_strategy(), rot in 0usize..4) {
        let base = segment_mixed_volume(&LineSegmentSupport::new(v.clone())).unwrap();
        let mut w = v.clone();
        let len = w.len();
        w.rotate_left(rot % len);
        w.reverse();
        prop_assert_eq!(segment_mixed_volume(&LineSegmentSupport::new(w)).unwrap(), base);
    }

    #[test]
    fn mixed_volume_is_unimodular_invariant(
        v in segments_strategy(),
        ops in prop::collection::vec((0usize..4, 0usize..4, -2i64..=2), 0..6),
    ) {
        let n = v.len();
        let u = unimodular(n, &ops);
        let w: Vec<Vec<i64>> = v
            .iter()
            .map(|row| (0..n).map(|i| (0..n).map(|j| u[i][j] * row[j]).sum()).collect())
            .collect();
        prop_assert_eq!(
            segment_mixed_volume(&LineSegmentSupport::new(w)).unwrap(),
            segment_mixed_volume(&LineSegmentSupport::new(v)).unwrap()
        );
    }
}

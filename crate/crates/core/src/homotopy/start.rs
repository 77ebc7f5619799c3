use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::modelsolve::ModelClass;
use crate::polysys::{segment_mixed_volume, Exponents, LineSegmentSupport, PolySystem, SparsePoly, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartKind {
    Binomial,
    TotalDegree,
}

/// A start system together with all of its roots.
#[derive(Clone, Debug)]
pub struct StartSystem {
    pub system: PolySystem,
    pub points: Vec<Vec<C64>>,
    pub kind: StartKind,
}

/// Equation `i` of a binomial system is `a_i x_{var_i}^{deg_i} + b_i`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Binomial {
    pub var: usize,
    pub degree: u8,
    pub a: C64,
    pub b: C64,
}

/// `(variable, degree)` of each binomial for the model class, in equation
/// order and in the class's variable order.
pub fn binomial_pattern(class: ModelClass, k: usize) -> Result<Vec<(usize, u8)>> {
    match class {
        ModelClass::LambdaWeighted => Ok((1..=k)
            .flat_map(|l| [(2 * (l - 1), (2 * l - 1) as u8), (2 * l - 1, l as u8)])
            .collect()),
        ModelClass::Homoscedastic => {
            let mut v = vec![(0, 1), (k, 1)];
            v.extend((3..=k + 1).map(|i| (i - 2, i as u8)));
            Ok(v)
        }
        other => Err(Error::Unsupported(format!("no binomial start system for class {other}"))),
    }
}

/// Axis-aligned segments `Conv{0, deg_i e_{var_i}}` of the binomial pattern.
pub fn binomial_segments(class: ModelClass, k: usize) -> Result<LineSegmentSupport> {
    let pattern = binomial_pattern(class, k)?;
    let segs: Vec<(usize, i64)> = pattern.iter().map(|&(v, d)| (v, d as i64)).collect();
    Ok(LineSegmentSupport::axis_aligned(pattern.len(), &segs))
}

/// Random unit-modulus complex number.
pub fn unit_complex<R: Rng>(rng: &mut R) -> C64 {
    C64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

/// Binomial start system for a model class with seeded random unit-modulus
/// coefficients.
pub fn binomial_start(class: ModelClass, k: usize, seed: u64) -> Result<StartSystem> {
    let pattern = binomial_pattern(class, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(2);
    let binomials: Vec<Binomial> = pattern
        .into_iter()
        .map(|(var, degree)| Binomial {
            var,
            degree,
            a: unit_complex(&mut rng),
            b: unit_complex(&mut rng),
        })
        .collect();
    let names = crate::moments::ParamLayout::new(k, &class_knowns(class, k))?.names;
    binomial_start_with(&binomials, names)
}

fn class_knowns(class: ModelClass, k: usize) -> crate::moments::Knowns {
    let w = Some(vec![1.0 / k as f64; k]);
    match class {
        ModelClass::LambdaWeighted => crate::moments::Knowns {
            weights: w,
            ..Default::default()
        },
        ModelClass::Homoscedastic => crate::moments::Knowns {
            weights: w,
            shared_variance: true,
            ..Default::default()
        },
        ModelClass::KnownVarianceMeansOnly => crate::moments::Knowns {
            weights: w,
            vars: Some(vec![1.0; k]),
            ..Default::default()
        },
        ModelClass::General => crate::moments::Knowns::none(),
    }
}

/// Binomial system with the given coefficients and all of its roots. Each
/// variable must appear in exactly one binomial.
pub fn binomial_start_with(binomials: &[Binomial], var_names: Vec<String>) -> Result<StartSystem> {
    let n = binomials.len();
    if var_names.len() != n {
        return Err(Error::NotSquare {
            polys: n,
            vars: var_names.len(),
        });
    }
    let segs: Vec<(usize, i64)> = binomials.iter().map(|b| (b.var, b.degree as i64)).collect();
    let mv = segment_mixed_volume(&LineSegmentSupport::axis_aligned(n, &segs))?;
    if mv == 0 {
        return Err(Error::InvalidParams("binomial supports are degenerate".into()));
    }
    let mut polys = Vec::with_capacity(n);
    // per-variable candidate values
    let mut roots: Vec<Vec<C64>> = vec![Vec::new(); n];
    for (i, b) in binomials.iter().enumerate() {
        if b.degree == 0 || b.a == C64::new(0.0, 0.0) || b.b == C64::new(0.0, 0.0) {
            return Err(Error::ZeroDegree { index: i });
        }
        let mut p = SparsePoly::monomial_in(n, b.var, b.degree, b.a);
        p.add_term(Exponents::zero(n), b.b);
        polys.push(p);
        let w = -b.b / b.a;
        let d = b.degree as f64;
        let r = w.norm().powf(1.0 / d);
        let theta = w.arg() / d;
        roots[b.var] = (0..b.degree)
            .map(|j| C64::from_polar(r, theta + 2.0 * PI * j as f64 / d))
            .collect();
    }
    let system = PolySystem::with_names(polys, var_names)?;
    let points = cartesian(&roots);
    debug_assert_eq!(points.len() as u128, mv);
    Ok(StartSystem {
        system,
        points,
        kind: StartKind::Binomial,
    })
}

fn cartesian(sets: &[Vec<C64>]) -> Vec<Vec<C64>> {
    let mut out: Vec<Vec<C64>> = vec![Vec::with_capacity(sets.len())];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for &v in set {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Total-degree start system `x_i^{d_i} − 1` for the degrees of `target`.
pub fn total_degree_start(target: &PolySystem) -> Result<StartSystem> {
    target.ensure_square()?;
    let degrees = target.degrees();
    let n = degrees.len();
    let mut polys = Vec::with_capacity(n);
    let mut roots = Vec::with_capacity(n);
    for (i, &d) in degrees.iter().enumerate() {
        if d == 0 {
            return Err(Error::ZeroDegree { index: i });
        }
        let d = u8::try_from(d).map_err(|_| Error::Unsupported(format!("degree {d} is too large")))?;
        polys.push(SparsePoly::monomial_in(n, i, d, 1.0) - C64::new(1.0, 0.0));
        roots.push(roots_of_unity(d as usize));
    }
    let system = PolySystem::with_names(polys, target.var_names().to_vec())?;
    Ok(StartSystem {
        system,
        points: cartesian(&roots),
        kind: StartKind::TotalDegree,
    })
}

pub fn roots_of_unity(d: usize) -> Vec<C64> {
    (0..d)
        .map(|j| C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64))
        .collect()
}

/// Start point number `index` of the total-degree system with `degrees`,
/// enumerated in the same order as [`total_degree_start`].
pub fn total_degree_point(degrees: &[u32], index: usize) -> Vec<C64> {
    let mut rem = index;
    let mut out = vec![C64::new(0.0, 0.0); degrees.len()];
    for i in (0..degrees.len()).rev() {
        let d = degrees[i] as usize;
        let j = rem % d;
        rem /= d;
        out[i] = C64::from_polar(1.0, 2.0 * PI * j as f64 / d as f64);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn start_points_solve_their_system() {
        for class in [ModelClass::LambdaWeighted, ModelClass::Homoscedastic] {
            for k in 1..=3 {
                let s = binomial_start(class, k, 11).unwrap();
                assert_eq!(s.points.len() as u128, class.expected_solutions(k));
                for p in &s.points {
                    assert!(s.system.residual(p).unwrap() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn example_coefficients() {
        let b = |var, degree, bb: f64| Binomial {
            var,
            degree,
            a: c(1.0),
            b: c(bb),
        };
        let names = ["mu1", "s1", "mu2", "s2"].map(String::from).to_vec();
        let s = binomial_start_with(&[b(0, 1, -10.0), b(1, 1, -12.0), b(2, 3, -27.0), b(3, 2, -4.0)], names).unwrap();
        assert_eq!(s.points.len(), 6);
        let eta = C64::from_polar(1.0, 2.0 * PI / 3.0);
        let contains = |q: [C64; 4]| s.points.iter().any(|p| p.iter().zip(&q).all(|(a, b)| (a - b).norm() < 1e-12));
        assert!(contains([c(10.0), c(12.0), c(3.0), c(2.0)]));
        assert!(contains([c(10.0), c(12.0), eta * 3.0, c(-2.0)]));
    }

    #[test]
    fn total_degree_counts_and_order() {
        let f = PolySystem::new(vec![
            SparsePoly::variable(2, 0) - c(1.0),
            SparsePoly::monomial_in(2, 1, 2, 1.0) - c(4.0),
        ])
        .unwrap();
        let s = total_degree_start(&f).unwrap();
        assert_eq!(s.points.len(), 2);
        for (i, p) in s.points.iter().enumerate() {
            let q = total_degree_point(&[1, 2], i);
            assert!(p.iter().zip(&q).all(|(a, b)| (a - b).norm() < 1e-15));
        }
    }

    #[test]
    fn zero_degree_rejected() {
        let f = PolySystem::new(vec![SparsePoly::constant(1, 2.0)]).unwrap();
        assert!(matches!(total_degree_start(&f), Err(Error::ZeroDegree { index: 0 })));
    }
}

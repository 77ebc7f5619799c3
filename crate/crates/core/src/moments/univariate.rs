use crate::error::{Error, Result};
use crate::polysys::{Exponents, SparsePoly, C64};

use super::gaussian::gaussian_moment_terms;

/// Where a univariate mixture parameter comes from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slot {
    Known(f64),
    Var(usize),
}

/// Partial assignment of `(λ, µ, σ²)` for a univariate k-mixture.
/// `shared_variance` ties all components to one variance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Knowns {
    pub weights: Option<Vec<f64>>,
    pub means: Option<Vec<f64>>,
    pub vars: Option<Vec<f64>>,
    pub shared_variance: bool,
}

impl Knowns {
    pub fn none() -> Self {
        Knowns::default()
    }

    pub fn weights(w: Vec<f64>) -> Self {
        Knowns {
            weights: Some(w),
            ..Knowns::default()
        }
    }
}

/// Variable layout of the unknown parameters.
///
/// With known weights and per-component unknown variances, the order is
/// `(µ₁, σ₁², …, µ_k, σ_k²)`. Otherwise unknowns are laid out in blocks:
/// weights, means, variances (one variable if shared).
#[derive(Clone, Debug, PartialEq)]
pub struct ParamLayout {
    pub k: usize,
    pub weights: Vec<Slot>,
    pub means: Vec<Slot>,
    pub vars: Vec<Slot>,
    pub names: Vec<String>,
}

impl ParamLayout {
    pub fn new(k: usize, knowns: &Knowns) -> Result<Self> {
        let check = |v: &Option<Vec<f64>>, what: &str| -> Result<()> {
            match v {
                Some(v) if v.len() != k => Err(Error::InvalidParams(format!(
                    "expected {k} known {what}, got {}",
                    v.len()
                ))),
                _ => Ok(()),
            }
        };
        if k == 0 {
            return Err(Error::InvalidParams("k must be positive".into()));
        }
        check(&knowns.weights, "weights")?;
        check(&knowns.means, "means")?;
        if !knowns.shared_variance {
            check(&knowns.vars, "variances")?;
        } else if let Some(v) = &knowns.vars {
            if v.is_empty() {
                return Err(Error::InvalidParams("shared variance value missing".into()));
            }
        }

        let mut names = Vec::new();
        let mut next = |name: String| {
            names.push(name);
            Slot::Var(names.len() - 1)
        };
        let known = |v: &Option<Vec<f64>>, l: usize| v.as_ref().map(|v| Slot::Known(v[l]));

        let interleaved = knowns.weights.is_some() && knowns.means.is_none() && knowns.vars.is_none() && !knowns.shared_variance;
        let (weights, means, vars);
        if interleaved {
            weights = (0..k).map(|l| known(&knowns.weights, l).unwrap()).collect();
            let mut m = Vec::with_capacity(k);
            let mut s = Vec::with_capacity(k);
            for l in 1..=k {
                m.push(next(format!("mu{l}")));
                s.push(next(format!("s{l}")));
            }
            means = m;
            vars = s;
        } else {
            weights = (0..k)
                .map(|l| known(&knowns.weights, l).unwrap_or_else(|| next(format!("lambda{}", l + 1))))
                .collect();
            means = (0..k)
                .map(|l| known(&knowns.means, l).unwrap_or_else(|| next(format!("mu{}", l + 1))))
                .collect();
            vars = if knowns.shared_variance {
                let slot = match &knowns.vars {
                    Some(v) => Slot::Known(v[0]),
                    None => next("s".into()),
                };
                vec![slot; k]
            } else {
                (0..k)
                    .map(|l| known(&knowns.vars, l).unwrap_or_else(|| next(format!("s{}", l + 1))))
                    .collect()
            };
        }
        if names.is_empty() {
            return Err(Error::NothingToSolve);
        }
        Ok(ParamLayout {
            k,
            weights,
            means,
            vars,
            names,
        })
    }

    pub fn nvars(&self) -> usize {
        self.names.len()
    }

    /// Reads `(weights, means, vars)` out of a point in this layout.
    pub fn unpack<T: Copy + From<f64>>(&self, x: &[T]) -> (Vec<T>, Vec<T>, Vec<T>) {
        let get = |s: &Slot| match *s {
            Slot::Known(v) => T::from(v),
            Slot::Var(i) => x[i],
        };
        (
            self.weights.iter().map(get).collect(),
            self.means.iter().map(get).collect(),
            self.vars.iter().map(get).collect(),
        )
    }
}

/// `Σ_ℓ λ_ℓ M_i(µ_ℓ, σ_ℓ²)` as a polynomial in the unknowns of `layout`.
pub fn mixture_moment_in(i: usize, layout: &ParamLayout) -> SparsePoly {
    let nv = layout.nvars();
    let mut p = SparsePoly::zero(nv);
    let terms = gaussian_moment_terms(i);
    for l in 0..layout.k {
        for &(a, b, c) in &terms {
            let mut coeff = c;
            let mut exps = vec![0u8; nv];
            let mut apply = |slot: Slot, power: u8| match slot {
                Slot::Known(v) => coeff *= v.powi(power as i32),
                Slot::Var(j) => exps[j] += power,
            };
            apply(layout.weights[l], 1);
            apply(layout.means[l], a);
            apply(layout.vars[l], b);
            if coeff != 0.0 {
                p.add_term(Exponents::new(exps), C64::new(coeff, 0.0));
            }
        }
    }
    p
}

/// `f_i^k` without its target: the mixture moment of order `i` in the
/// unknowns left free by `knowns`.
pub fn mixture_moment_poly(i: usize, k: usize, knowns: &Knowns) -> Result<SparsePoly> {
    let layout = ParamLayout::new(k, knowns)?;
    Ok(mixture_moment_in(i, &layout))
}

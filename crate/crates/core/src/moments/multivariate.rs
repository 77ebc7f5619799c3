use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::polysys::{Exponents, SparsePoly, C64};

use super::params::MixtureParams;
use super::table::{MomentKey, MomentTable};

/// Variable order for a full multivariate k-mixture in ℝⁿ:
/// `λ₁…λ_k`, then `µ_{ℓ1}…µ_{ℓn}` per component, then the upper
/// triangle `σ_{ℓst}` (s ≤ t, row-major) per component.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MultiLayout {
    pub k: usize,
    pub n: usize,
}

impl MultiLayout {
    pub fn new(k: usize, n: usize) -> Self {
        MultiLayout { k, n }
    }

    fn tri(&self) -> usize {
        self.n * (self.n + 1) / 2
    }

    pub fn len(&self) -> usize {
        self.k + self.k * self.n + self.k * self.tri()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn lambda(&self, l: usize) -> usize {
        l
    }

    pub fn mu(&self, l: usize, s: usize) -> usize {
        self.k + l * self.n + s
    }

    pub fn sigma(&self, l: usize, s: usize, t: usize) -> usize {
        let (s, t) = if s <= t { (s, t) } else { (t, s) };
        // rows before s contribute n, n-1, ..., n-s+1 entries
        let before = s * self.n - s * (s.saturating_sub(1)) / 2;
        self.k + self.k * self.n + l * self.tri() + before + (t - s)
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = (1..=self.k).map(|l| format!("lambda{l}")).collect();
        for l in 1..=self.k {
            for s in 1..=self.n {
                v.push(format!("mu{l}_{s}"));
            }
        }
        for l in 1..=self.k {
            for s in 1..=self.n {
                for t in s..=self.n {
                    v.push(format!("sigma{l}_{s}{t}"));
                }
            }
        }
        v
    }

    /// Values of every layout variable for `params`.
    pub fn pack(&self, params: &MixtureParams) -> Vec<f64> {
        let mut v = vec![0.0; self.len()];
        for l in 0..self.k {
            v[self.lambda(l)] = params.weights[l];
            for s in 0..self.n {
                v[self.mu(l, s)] = params.means[l][s];
                for t in s..self.n {
                    v[self.sigma(l, s, t)] = params.covariances[l][s][t];
                }
            }
        }
        v
    }
}

/// One Gaussian's moment for a key restricted to its support: a polynomial
/// in local means `µ_0..µ_{d−1}` followed by local covariances `σ_ab`
/// (a ≤ b, row-major).
#[derive(Debug)]
pub struct MomentTemplate {
    pub exponents: Vec<u32>,
    pub terms: Vec<(Vec<u8>, BigRational)>,
    float_terms: Vec<(Vec<u8>, f64)>,
}

impl MomentTemplate {
    pub fn support_len(&self) -> usize {
        self.exponents.len()
    }

    fn local_len(d: usize) -> usize {
        d + d * (d + 1) / 2
    }

    fn build(exponents: &[u32]) -> Self {
        let d = exponents.len();
        // (local variable index, t-exponent vector, base factor)
        let mut sig_monos: Vec<(usize, Vec<u32>, BigRational)> = Vec::new();
        let mut idx = d;
        for a in 0..d {
            for b in a..d {
                let mut alpha = vec![0u32; d];
                alpha[a] += 1;
                alpha[b] += 1;
                let f = if a == b {
                    BigRational::new(BigInt::one(), BigInt::from(2))
                } else {
                    BigRational::one()
                };
                sig_monos.push((idx, alpha, f));
                idx += 1;
            }
        }
        let key_fact: BigInt = exponents.iter().map(|&e| factorial(e)).product();
        let mut acc: HashMap<Vec<u8>, BigRational> = HashMap::new();
        let mut exps = vec![0u8; Self::local_len(d)];
        let mut remaining = exponents.to_vec();
        enumerate(
            &sig_monos,
            0,
            &mut remaining,
            &mut exps,
            BigRational::from_integer(key_fact),
            &mut acc,
        );
        let mut terms: Vec<(Vec<u8>, BigRational)> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_by(|a, b| a.0.cmp(&b.0));
        let float_terms = terms
            .iter()
            .map(|(e, c)| (e.clone(), c.to_f64().expect("finite coefficient")))
            .collect();
        MomentTemplate {
            exponents: exponents.to_vec(),
            terms,
            float_terms,
        }
    }

    /// Value at local means `mu` (length d) and local covariance entries.
    pub fn evaluate(&self, mu: &[f64], sigma: &[f64]) -> f64 {
        let d = mu.len();
        self.float_terms
            .iter()
            .map(|(e, c)| {
                let mut v = *c;
                for (j, &p) in e.iter().enumerate() {
                    if p > 0 {
                        let x = if j < d { mu[j] } else { sigma[j - d] };
                        v *= x.powi(p as i32);
                    }
                }
                v
            })
            .sum()
    }
}

fn factorial(m: u32) -> BigInt {
    (1..=m).fold(BigInt::one(), |acc, v| acc * BigInt::from(v))
}

fn enumerate(
    monos: &[(usize, Vec<u32>, BigRational)],
    pos: usize,
    remaining: &mut [u32],
    exps: &mut [u8],
    coeff: BigRational,
    acc: &mut HashMap<Vec<u8>, BigRational>,
) {
    if pos == monos.len() {
        // the mean monomials µ_a t_a absorb what is left
        let mut c = coeff;
        for (a, &r) in remaining.iter().enumerate() {
            exps[a] = r as u8;
            c /= BigRational::from_integer(factorial(r));
        }
        let entry = acc.entry(exps.to_vec()).or_insert_with(BigRational::zero);
        *entry += c;
        for e in exps.iter_mut().take(remaining.len()) {
            *e = 0;
        }
        return;
    }
    let (var, alpha, base) = &monos[pos];
    let mut j = 0u32;
    let mut c = coeff;
    loop {
        exps[*var] = j as u8;
        enumerate(monos, pos + 1, remaining, exps, c.clone(), acc);
        if alpha.iter().zip(remaining.iter()).any(|(&a, &r)| a > r) {
            break;
        }
        for (r, &a) in remaining.iter_mut().zip(alpha) {
            *r -= a;
        }
        j += 1;
        c = c * base / BigRational::from_integer(BigInt::from(j));
    }
    for (r, &a) in remaining.iter_mut().zip(alpha) {
        *r += a * j;
    }
    exps[*var] = 0;
}

fn template_cache() -> &'static Mutex<HashMap<Vec<u32>, Arc<MomentTemplate>>> {
    static CACHE: OnceLock<Mutex<HashMap<Vec<u32>, Arc<MomentTemplate>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Single-Gaussian moment template for the positive entries of `key`.
pub fn moment_template(key: &MomentKey) -> Arc<MomentTemplate> {
    let exps: Vec<u32> = key.index().iter().copied().filter(|&e| e > 0).collect();
    if let Some(t) = template_cache().lock().unwrap().get(&exps) {
        return t.clone();
    }
    let t = Arc::new(MomentTemplate::build(&exps));
    template_cache().lock().unwrap().entry(exps).or_insert(t).clone()
}

/// Default truncation order for a k-mixture.
pub fn default_max_order(k: usize) -> u32 {
    3 * k as u32 + 1
}

/// `m_key` for a k-mixture as an exact polynomial in the layout variables
/// not fixed by `knowns` (indexed like [`MultiLayout`]; an empty slice
/// means nothing is known).
pub fn multivariate_moment_poly(key: &MomentKey, k: usize, knowns: &[Option<f64>]) -> Result<SparsePoly> {
    multivariate_moment_poly_with_max(key, k, knowns, default_max_order(k))
}

pub fn multivariate_moment_poly_with_max(
    key: &MomentKey,
    k: usize,
    knowns: &[Option<f64>],
    max_order: u32,
) -> Result<SparsePoly> {
    let layout = MultiLayout::new(k, key.dim());
    if key.order() > max_order {
        return Err(Error::OrderTooLarge {
            order: key.order(),
            max: max_order,
        });
    }
    let knowns: Vec<Option<f64>> = if knowns.is_empty() {
        vec![None; layout.len()]
    } else if knowns.len() == layout.len() {
        knowns.to_vec()
    } else {
        return Err(Error::DimensionMismatch {
            expected: layout.len(),
            got: knowns.len(),
        });
    };
    let mut reduced = vec![usize::MAX; layout.len()];
    let mut nfree = 0;
    for (i, kv) in knowns.iter().enumerate() {
        if kv.is_none() {
            reduced[i] = nfree;
            nfree += 1;
        }
    }
    if nfree == 0 {
        return Err(Error::NothingToSolve);
    }
    let support = key.support();
    let template = moment_template(key);
    let d = support.len();
    let mut p = SparsePoly::zero(nfree);
    for l in 0..k {
        // global index of each local variable
        let mut global = Vec::with_capacity(MomentTemplate::local_len(d));
        for &s in &support {
            global.push(layout.mu(l, s));
        }
        for a in 0..d {
            for b in a..d {
                global.push(layout.sigma(l, support[a], support[b]));
            }
        }
        for (e, c) in &template.terms {
            let mut coeff = c.to_f64().expect("finite coefficient");
            let mut exps = vec![0u8; nfree];
            let mut place = |g: usize, pw: u8| match knowns[g] {
                Some(v) => coeff *= v.powi(pw as i32),
                None => exps[reduced[g]] += pw,
            };
            place(layout.lambda(l), 1);
            for (j, &pw) in e.iter().enumerate() {
                if pw > 0 {
                    place(global[j], pw);
                }
            }
            if coeff != 0.0 {
                p.add_term(Exponents::new(exps), C64::new(coeff, 0.0));
            }
        }
    }
    Ok(p)
}

/// `E[Π X_s^{i_s}]` for one Gaussian `N(mean, cov)`.
pub fn gaussian_multi_moment(key: &MomentKey, mean: &[f64], cov: &[Vec<f64>]) -> f64 {
    let support = key.support();
    let template = moment_template(key);
    let mu: Vec<f64> = support.iter().map(|&s| mean[s]).collect();
    let mut sigma = Vec::with_capacity(support.len() * (support.len() + 1) / 2);
    for a in 0..support.len() {
        for b in a..support.len() {
            sigma.push(cov[support[a]][support[b]]);
        }
    }
    template.evaluate(&mu, &sigma)
}

/// Moments of the mixture `params` for every key.
pub fn exact_moments(params: &MixtureParams, keys: &[MomentKey]) -> Result<MomentTable> {
    exact_moments_with_max(params, keys, default_max_order(params.k))
}

pub fn exact_moments_with_max(params: &MixtureParams, keys: &[MomentKey], max_order: u32) -> Result<MomentTable> {
    params.validate()?;
    let mut table = MomentTable::new(params.n);
    for key in keys {
        if key.dim() != params.n {
            return Err(Error::DimensionMismatch {
                expected: params.n,
                got: key.dim(),
            });
        }
        if key.order() > max_order {
            return Err(Error::OrderTooLarge {
                order: key.order(),
                max: max_order,
            });
        }
        let value = (0..params.k)
            .map(|l| params.weights[l] * gaussian_multi_moment(key, &params.means[l], &params.covariances[l]))
            .sum();
        table.insert(key.clone(), value)?;
    }
    Ok(table)
}

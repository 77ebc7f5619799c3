use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Exponents(Box<[u8]>);

impl Exponents {
    pub fn new(exps: impl Into<Box<[u8]>>) -> Self {
        Exponents(exps.into())
    }

    pub fn zero(nvars: usize) -> Self {
        Exponents(vec![0; nvars].into_boxed_slice())
    }

    pub fn unit(nvars: usize, var: usize, power: u8) -> Self {
        let mut e = vec![0; nvars];
        e[var] = power;
        Exponents(e.into_boxed_slice())
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn product(&self, other: &Exponents) -> Exponents {
        let e: Vec<u8> = self
            .0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a.checked_add(*b).expect("exponent overflow"))
            .collect();
        Exponents(e.into_boxed_slice())
    }
}

impl Ord for Exponents {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Exponents {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponents {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &self.0)
    }
}

/// Multivariate polynomial with complex coefficients, stored sparsely by
/// exponent vector. Terms iterate in ascending graded-lex order.
#[derive(Clone, PartialEq)]
pub struct SparsePoly {
    nvars: usize,
    terms: BTreeMap<Exponents, C64>,
}

impl SparsePoly {
    pub fn zero(nvars: usize) -> Self {
        SparsePoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: impl Into<C64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::zero(nvars), c.into());
        p
    }

    pub fn variable(nvars: usize, var: usize) -> Self {
        assert!(var < nvars, "variable {var} out of range for {nvars} variables");
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::unit(nvars, var, 1), C64::new(1.0, 0.0));
        p
    }

    /// `coeff * x_var^power`.
    pub fn monomial_in(nvars: usize, var: usize, power: u8, coeff: impl Into<C64>) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(Exponents::unit(nvars, var, power), coeff.into());
        p
    }

    pub fn from_terms<I>(nvars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, C64)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    got: e.len(),
                });
            }
            p.add_term(Exponents::new(e), c);
        }
        Ok(p)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponents, &C64)> + ExactSizeIterator {
        self.terms.iter()
    }

    /// Monomial support, in graded-lex order.
    pub fn support(&self) -> Vec<Exponents> {
        self.terms.keys().cloned().collect()
    }

    pub fn coefficient(&self, exps: &[u8]) -> C64 {
        self.terms
            .get(&Exponents::new(exps.to_vec()))
            .copied()
            .unwrap_or_default()
    }

    pub fn constant_term(&self) -> C64 {
        self.coefficient(&vec![0; self.nvars])
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Exponents::degree).max().unwrap_or(0)
    }

    /// Homogenizes to `degree` with a new variable appended last, so every
    /// term `c·x^e` becomes `c·x^e·x₀^(degree − |e|)`.
    pub fn homogenize(&self, degree: u32) -> Self {
        let mut out = Self::zero(self.nvars + 1);
        for (e, c) in &self.terms {
            let pad = degree.checked_sub(e.degree()).expect("degree below the total degree");
            let mut exps = e.as_slice().to_vec();
            exps.push(u8::try_from(pad).expect("homogenizing degree fits in u8"));
            out.add_term(Exponents::new(exps), *c);
        }
        out
    }

    pub fn degree_in(&self, var: usize) -> u8 {
        self.terms
            .keys()
            .map(|e| e.as_slice()[var])
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Exponents, c: C64) {
        debug_assert_eq!(exps.len(), self.nvars);
        if c == C64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = *o.get() + c;
                if sum == C64::new(0.0, 0.0) {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn scale(&self, c: impl Into<C64>) -> Self {
        let c = c.into();
        let mut out = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            out.add_term(e.clone(), v * c);
        }
        out
    }

    /// Replaces the constant term with `c`.
    pub fn with_constant(&self, c: impl Into<C64>) -> Self {
        let mut out = self.clone();
        out.terms.remove(&Exponents::zero(self.nvars));
        out.add_term(Exponents::zero(self.nvars), c.into());
        out
    }

    pub fn derivative(&self, var: usize) -> Self {
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let p = e.as_slice()[var];
            if p == 0 {
                continue;
            }
            let mut d = e.as_slice().to_vec();
            d[var] -= 1;
            out.add_term(Exponents::new(d), c * p as f64);
        }
        out
    }

    /// Substitutes the variables whose entry is `Some`, keeping the variable
    /// count unchanged (substituted variables simply stop appearing).
    pub fn substitute(&self, values: &[Option<C64>]) -> Result<Self> {
        if values.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: values.len(),
            });
        }
        let mut out = Self::zero(self.nvars);
        for (e, c) in &self.terms {
            let mut coeff = *c;
            let mut rest = e.as_slice().to_vec();
            for (v, val) in values.iter().enumerate() {
                if let Some(val) = val {
                    if rest[v] > 0 {
                        coeff *= val.powu(rest[v] as u32);
                        rest[v] = 0;
                    }
                }
            }
            out.add_term(Exponents::new(rest), coeff);
        }
        Ok(out)
    }

    /// Evaluates at `x`. Monomials use memoized powers per point; the sum is
    /// compensated and accumulated in graded-lex order.
    pub fn evaluate(&self, x: &[C64]) -> Result<C64> {
        if x.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                got: x.len(),
            });
        }
        let mut powers = PowerCache::new(x);
        let mut acc = CompensatedSum::default();
        for (e, c) in &self.terms {
            acc.add(c * powers.monomial(e.as_slice()));
        }
        Ok(acc.value())
    }

    /// Sum of absolute values of the terms at `x`; the scale against which a
    /// residual of this polynomial is meaningful.
    pub fn term_magnitude(&self, x: &[C64]) -> f64 {
        let mut powers = PowerCache::new(x);
        self.terms
            .iter()
            .map(|(e, c)| (c * powers.monomial(e.as_slice())).norm())
            .sum()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Renders the polynomial with the given variable names, highest
    /// graded-lex term first.
    pub fn to_text(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let (neg, mag) = split_sign(*c);
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono: Vec<String> = e
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &p)| p > 0)
                .map(|(v, &p)| {
                    let name = names.get(v).cloned().unwrap_or_else(|| format!("x{}", v + 1));
                    if p == 1 {
                        name
                    } else {
                        format!("{name}^{p}")
                    }
                })
                .collect();
            let coeff = format_coeff(mag);
            if mono.is_empty() {
                out.push_str(&coeff);
            } else if coeff == "1" {
                out.push_str(&mono.join("*"));
            } else {
                out.push_str(&coeff);
                out.push('*');
                out.push_str(&mono.join("*"));
            }
        }
        out
    }
}

fn split_sign(c: C64) -> (bool, C64) {
    if c.im == 0.0 && c.re < 0.0 {
        (true, -c)
    } else {
        (false, c)
    }
}

fn format_coeff(c: C64) -> String {
    if c.im == 0.0 {
        format!("{}", c.re)
    } else {
        format!("({}{:+}i)", c.re, c.im)
    }
}

impl fmt::Debug for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparsePoly({})", self.to_text(&[]))
    }
}

/// Memoized integer powers of the coordinates of one point.
pub(crate) struct PowerCache<'a> {
    x: &'a [C64],
    cache: Vec<Vec<Option<C64>>>,
}

impl<'a> PowerCache<'a> {
    pub(crate) fn new(x: &'a [C64]) -> Self {
        PowerCache {
            x,
            cache: vec![Vec::new(); x.len()],
        }
    }

    fn power(&mut self, var: usize, p: u8) -> C64 {
        let slot = &mut self.cache[var];
        if slot.len() <= p as usize {
            slot.resize(p as usize + 1, None);
        }
        *slot[p as usize].get_or_insert_with(|| self.x[var].powu(p as u32))
    }

    pub(crate) fn monomial(&mut self, exps: &[u8]) -> C64 {
        let mut m = C64::new(1.0, 0.0);
        for (v, &p) in exps.iter().enumerate() {
            if p > 0 {
                m *= self.power(v, p);
            }
        }
        m
    }
}

/// Neumaier summation applied to both components.
#[derive(Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    re: f64,
    im: f64,
    cre: f64,
    cim: f64,
}

impl CompensatedSum {
    fn step(sum: &mut f64, comp: &mut f64, v: f64) {
        let t = *sum + v;
        if sum.abs() >= v.abs() {
            *comp += (*sum - t) + v;
        } else {
            *comp += (v - t) + *sum;
        }
        *sum = t;
    }

    pub(crate) fn add(&mut self, v: C64) {
        Self::step(&mut self.re, &mut self.cre, v.re);
        Self::step(&mut self.im, &mut self.cim, v.im);
    }

    pub(crate) fn value(&self) -> C64 {
        C64::new(self.re + self.cre, self.im + self.cim)
    }
}

impl AddAssign<&SparsePoly> for SparsePoly {
    fn add_assign(&mut self, rhs: &SparsePoly) {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        for (e, c) in &rhs.terms {
            self.add_term(e.clone(), *c);
        }
    }
}

impl Add<&SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn add(self, rhs: &SparsePoly) -> SparsePoly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Add for SparsePoly {
    type Output = SparsePoly;
    fn add(mut self, rhs: SparsePoly) -> SparsePoly {
        self += &rhs;
        self
    }
}

impl Sub<&SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c);
        }
        out
    }
}

impl Sub for SparsePoly {
    type Output = SparsePoly;
    fn sub(self, rhs: SparsePoly) -> SparsePoly {
        &self - &rhs
    }
}

impl Neg for SparsePoly {
    type Output = SparsePoly;
    fn neg(self) -> SparsePoly {
        self.scale(-1.0)
    }
}

impl Mul<&SparsePoly> for &SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: &SparsePoly) -> SparsePoly {
        assert_eq!(self.nvars, rhs.nvars, "nvars mismatch");
        let mut out = SparsePoly::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea.product(eb), ca * cb);
            }
        }
        out
    }
}

impl Mul for SparsePoly {
    type Output = SparsePoly;
    fn mul(self, rhs: SparsePoly) -> SparsePoly {
        &self * &rhs
    }
}

impl Sub<C64> for SparsePoly {
    type Output = SparsePoly;
    fn sub(mut self, rhs: C64) -> SparsePoly {
        self.add_term(Exponents::zero(self.nvars), -rhs);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn grlex_orders_by_degree_then_lex() {
        let a = Exponents::new(vec![0, 2]);
        let b = Exponents::new(vec![1, 0]);
        let d = Exponents::new(vec![2, 0]);
        assert!(b < a);
        assert!(a < d);
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let x = SparsePoly::variable(2, 0);
        let p = &x - &x;
        assert!(p.is_zero());
        let q = SparsePoly::from_terms(2, vec![(vec![1, 0], c(0.0))]).unwrap();
        assert!(q.is_zero());
    }

    #[test]
    fn evaluate_linear_example() {
        // µ₁ − 10 at µ₁ = 10
        let p = SparsePoly::variable(1, 0) - c(10.0);
        assert_eq!(p.evaluate(&[c(10.0)]).unwrap(), c(0.0));
    }

    #[test]
    fn evaluate_constant_anywhere() {
        let p = SparsePoly::constant(3, 1.0);
        let v = p.evaluate(&[c(2.0), C64::new(0.3, -4.0), c(-7.0)]).unwrap();
        assert_eq!(v, c(1.0));
    }

    #[test]
    fn evaluate_variance_variable_squared() {
        // σ₂⁴ − 4 in the variable s = σ₂², at s = −2.
        let p = SparsePoly::monomial_in(1, 0, 2, 1.0) - c(4.0);
        assert_eq!(p.evaluate(&[c(-2.0)]).unwrap(), c(0.0));
    }

    #[test]
    fn evaluate_rejects_wrong_length() {
        let p = SparsePoly::variable(2, 1);
        assert!(matches!(
            p.evaluate(&[c(1.0)]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn derivative_and_substitute() {
        // p = 3 x^2 y + y
        let p = SparsePoly::from_terms(2, vec![(vec![2, 1], c(3.0)), (vec![0, 1], c(1.0))]).unwrap();
        let dx = p.derivative(0);
        assert_eq!(dx.coefficient(&[1, 1]), c(6.0));
        assert_eq!(dx.len(), 1);
        let s = p.substitute(&[Some(c(2.0)), None]).unwrap();
        assert_eq!(s.coefficient(&[0, 1]), c(13.0));
    }

    #[test]
    fn text_dump_is_grlex_descending() {
        let p = SparsePoly::from_terms(
            2,
            vec![(vec![0, 0], c(-2.5)), (vec![1, 0], c(0.5)), (vec![0, 2], c(1.0))],
        )
        .unwrap();
        let names = vec!["mu1".to_string(), "s1".to_string()];
        assert_eq!(p.to_text(&names), "s1^2 + 0.5*mu1 - 2.5");
    }

    #[test]
    fn homogenizing_scales_by_the_new_variable() {
        // x²y − 3x + 2, degree 3
        let x = SparsePoly::variable(2, 0);
        let y = SparsePoly::variable(2, 1);
        let p = &(&(&x * &x) * &y) - &(&x.scale(3.0) - &SparsePoly::constant(2, 2.0));
        let h = p.homogenize(3);
        assert_eq!(h.nvars(), 3);
        assert_eq!(h.total_degree(), 3);
        assert!(h.terms().all(|(e, _)| e.degree() == 3));
        let pt = [C64::new(0.7, -0.2), C64::new(-1.1, 0.4)];
        let s = C64::new(0.3, 0.9);
        let lifted = [pt[0] * s, pt[1] * s, s];
        let want = p.evaluate(&pt).unwrap() * s.powu(3);
        assert!((h.evaluate(&lifted).unwrap() - want).norm() < 1e-14);
    }
}

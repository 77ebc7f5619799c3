use crate::polysys::{SparsePoly, C64};

/// Values that the Gaussian moment recursion can run over.
pub trait MomentRing: Clone {
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn scale(&self, c: f64) -> Self;
}

impl MomentRing for f64 {
    fn one_like(&self) -> Self {
        1.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

impl MomentRing for C64 {
    fn one_like(&self) -> Self {
        C64::new(1.0, 0.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: f64) -> Self {
        self * c
    }
}

impl MomentRing for SparsePoly {
    fn one_like(&self) -> Self {
        SparsePoly::constant(self.nvars(), 1.0)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: f64) -> Self {
        SparsePoly::scale(self, c)
    }
}

/// `M_0 … M_max` for N(mu, var).
pub fn gaussian_moments_upto<T: MomentRing>(max: usize, mu: &T, var: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(max + 1);
    out.push(mu.one_like());
    if max >= 1 {
        out.push(mu.clone());
    }
    for i in 2..=max {
        let next = mu.mul(&out[i - 1]).add(&var.mul(&out[i - 2]).scale((i - 1) as f64));
        out.push(next);
    }
    out
}

/// `M_i(µ, σ²) = µ M_{i−1} + (i−1) σ² M_{i−2}`, with `M_0 = 1`, `M_1 = µ`.
pub fn gaussian_moment<T: MomentRing>(i: usize, mu: &T, var: &T) -> T {
    gaussian_moments_upto(i, mu, var).pop().expect("non-empty")
}

/// Terms `(a, b, c)` of `M_i = Σ c µ^a (σ²)^b`, where `a + 2b = i` and
/// `c = i! / (a! b! 2^b)`.
pub fn gaussian_moment_terms(i: usize) -> Vec<(u8, u8, f64)> {
    let fact = |m: usize| (1..=m).fold(1.0f64, |acc, v| acc * v as f64);
    (0..=i / 2)
        .map(|b| {
            let a = i - 2 * b;
            let c = fact(i) / (fact(a) * fact(b) * 2f64.powi(b as i32));
            (a as u8, b as u8, c.round())
        })
        .collect()
}

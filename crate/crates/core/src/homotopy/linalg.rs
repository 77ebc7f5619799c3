use crate::polysys::C64;

const MAX_DIM: usize = 64;

/// LU factorisation with partial pivoting of a small dense complex matrix
/// stored row-major.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    lu: Vec<C64>,
    perm: Vec<usize>,
    norm1: f64,
    singular: bool,
}

impl Lu {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_DIM, "dense solves are limited to {MAX_DIM} unknowns");
        Lu {
            n,
            lu: vec![C64::new(0.0, 0.0); n * n],
            perm: (0..n).collect(),
            norm1: 0.0,
            singular: false,
        }
    }

    /// Factors `a`; returns false when a zero pivot shows up.
    pub fn factor(&mut self, a: &[C64]) -> bool {
        let n = self.n;
        self.lu.copy_from_slice(&a[..n * n]);
        self.norm1 = (0..n)
            .map(|c| (0..n).map(|r| a[r * n + c].norm()).sum::<f64>())
            .fold(0.0, f64::max);
        for (i, p) in self.perm.iter_mut().enumerate() {
            *p = i;
        }
        self.singular = false;
        let lu = &mut self.lu;
        for k in 0..n {
            let (mut best, mut best_abs) = (k, lu[k * n + k].norm());
            for r in k + 1..n {
                let v = lu[r * n + k].norm();
                if v > best_abs {
                    best = r;
                    best_abs = v;
                }
            }
            if best_abs == 0.0 || !best_abs.is_finite() {
                self.singular = true;
                return false;
            }
            if best != k {
                for c in 0..n {
                    lu.swap(k * n + c, best * n + c);
                }
                self.perm.swap(k, best);
            }
            let inv = C64::new(1.0, 0.0) / lu[k * n + k];
            for r in k + 1..n {
                let f = lu[r * n + k] * inv;
                lu[r * n + k] = f;
                if f != C64::new(0.0, 0.0) {
                    for c in k + 1..n {
                        let v = lu[k * n + c];
                        lu[r * n + c] -= f * v;
                    }
                }
            }
        }
        true
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Overwrites `b` with `A⁻¹ b`.
    pub fn solve(&self, b: &mut [C64]) {
        let n = self.n;
        let lu = &self.lu;
        let mut buf = [C64::new(0.0, 0.0); MAX_DIM];
        let y = &mut buf[..n];
        for (yi, &p) in y.iter_mut().zip(&self.perm) {
            *yi = b[p];
        }
        for r in 0..n {
            let mut s = y[r];
            for c in 0..r {
                s -= lu[r * n + c] * y[c];
            }
            y[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for c in r + 1..n {
                s -= lu[r * n + c] * y[c];
            }
            y[r] = s / lu[r * n + r];
        }
        b[..n].copy_from_slice(y);
    }

    /// `‖A‖₁ ‖A⁻¹‖₁`, with `A⁻¹` formed column by column.
    pub fn condition(&self) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.n;
        let mut inv_norm = 0.0f64;
        let mut col = vec![C64::new(0.0, 0.0); n];
        for c in 0..n {
            col.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            col[c] = C64::new(1.0, 0.0);
            self.solve(&mut col);
            inv_norm = inv_norm.max(col.iter().map(|z| z.norm()).sum());
        }
        let k = self.norm1 * inv_norm;
        if k.is_finite() {
            k
        } else {
            f64::INFINITY
        }
    }
}

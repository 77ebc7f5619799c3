use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Weights, mean vectors and covariance matrices of a k-component mixture
/// in ℝⁿ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixtureParams {
    pub k: usize,
    pub n: usize,
    pub weights: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    pub covariances: Vec<Vec<Vec<f64>>>,
}

impl MixtureParams {
    pub fn new(weights: Vec<f64>, means: Vec<Vec<f64>>, covariances: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let p = MixtureParams {
            k: weights.len(),
            n: means.first().map(Vec::len).unwrap_or(0),
            weights,
            means,
            covariances,
        };
        p.validate()?;
        Ok(p)
    }

    /// Diagonal covariances given by `vars[ℓ][s]`.
    pub fn diagonal(weights: Vec<f64>, means: Vec<Vec<f64>>, vars: Vec<Vec<f64>>) -> Result<Self> {
        let covariances = vars
            .iter()
            .map(|v| {
                (0..v.len())
                    .map(|r| (0..v.len()).map(|c| if r == c { v[r] } else { 0.0 }).collect())
                    .collect()
            })
            .collect();
        Self::new(weights, means, covariances)
    }

    pub fn univariate(weights: Vec<f64>, means: Vec<f64>, vars: Vec<f64>) -> Result<Self> {
        Self::diagonal(
            weights,
            means.into_iter().map(|m| vec![m]).collect(),
            vars.into_iter().map(|v| vec![v]).collect(),
        )
    }

    /// Shape and simplex checks; symmetric covariances.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParams(m));
        if self.k == 0 || self.n == 0 {
            return bad("need at least one component and one dimension".into());
        }
        if self.weights.len() != self.k || self.means.len() != self.k || self.covariances.len() != self.k {
            return bad(format!("expected {} weights, means and covariances", self.k));
        }
        for (l, w) in self.weights.iter().enumerate() {
            if !(w.is_finite() && *w > 0.0 && *w <= 1.0) {
                return bad(format!("weight {} = {w} is outside (0, 1]", l + 1));
            }
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("weights sum to {total}, not 1"));
        }
        for l in 0..self.k {
            if self.means[l].len() != self.n || self.means[l].iter().any(|v| !v.is_finite()) {
                return bad(format!("mean {} must hold {} finite values", l + 1, self.n));
            }
            let s = &self.covariances[l];
            if s.len() != self.n || s.iter().any(|r| r.len() != self.n) {
                return bad(format!("covariance {} must be {}x{}", l + 1, self.n, self.n));
            }
            for r in 0..self.n {
                for c in 0..self.n {
                    if !s[r][c].is_finite() {
                        return bad(format!("covariance {} has a non-finite entry", l + 1));
                    }
                    let scale = s[r][c].abs().max(s[c][r].abs()).max(1.0);
                    if (s[r][c] - s[c][r]).abs() > 1e-12 * scale {
                        return bad(format!("covariance {} is not symmetric", l + 1));
                    }
                }
            }
        }
        Ok(())
    }

    /// Every covariance is positive definite.
    pub fn is_meaningful(&self) -> bool {
        self.validate().is_ok()
            && self.covariances.iter().all(|s| {
                let m = DMatrix::from_fn(self.n, self.n, |r, c| s[r][c]);
                m.cholesky().is_some()
            })
    }

    pub fn is_diagonal(&self) -> bool {
        self.covariances
            .iter()
            .all(|s| (0..self.n).all(|r| (0..self.n).all(|c| r == c || s[r][c] == 0.0)))
    }

    pub fn var(&self, l: usize, s: usize) -> f64 {
        self.covariances[l][s][s]
    }

    pub fn permuted(&self, perm: &[usize]) -> Self {
        MixtureParams {
            k: self.k,
            n: self.n,
            weights: perm.iter().map(|&p| self.weights[p]).collect(),
            means: perm.iter().map(|&p| self.means[p].clone()).collect(),
            covariances: perm.iter().map(|&p| self.covariances[p].clone()).collect(),
        }
    }

    /// Flat parameter vector: weights, then means, then either the
    /// diagonal variances or the upper triangles of the covariances.
    pub fn parameter_vector(&self, diagonal_only: bool) -> Vec<f64> {
        let mut v = self.weights.clone();
        for m in &self.means {
            v.extend_from_slice(m);
        }
        for s in &self.covariances {
            for r in 0..self.n {
                if diagonal_only {
                    v.push(s[r][r]);
                } else {
                    v.extend_from_slice(&s[r][r..]);
                }
            }
        }
        v
    }

    /// `‖v − v̂‖₂` minimised over component relabellings of `other`.
    pub fn aligned_error(&self, other: &MixtureParams, diagonal_only: bool) -> f64 {
        if self.k != other.k || self.n != other.n {
            return f64::INFINITY;
        }
        let truth = self.parameter_vector(diagonal_only);
        permutations(self.k)
            .into_iter()
            .map(|p| {
                let v = other.permuted(&p).parameter_vector(diagonal_only);
                truth.iter().zip(&v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// `aligned_error / parameter count`.
    pub fn normalized_error(&self, other: &MixtureParams, diagonal_only: bool) -> f64 {
        self.aligned_error(other, diagonal_only) / self.parameter_vector(diagonal_only).len() as f64
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let p: MixtureParams = serde_json::from_str(s)?;
        p.validate()?;
        Ok(p)
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// All permutations of `0..k` in lexicographic order.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    fn rec(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                rec(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; k], &mut out);
    out
}

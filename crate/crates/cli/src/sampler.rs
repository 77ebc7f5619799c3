//! Seeded random mixtures for self-tests and benchmarks.
//!
//! Weights: i.i.d. `Exp(1)` draws normalised to the simplex, then mapped to
//! `floor + (1 − k·floor)·w` so every weight is at least `floor`. Means:
//! uniform on `[−mean_range, mean_range]` per coordinate, redrawn until all
//! pairwise gaps are at least `mean_gap`. Variances: uniform on
//! `[var_min, var_max]`.

use gmm_moments::moments::MixtureParams;
use gmm_moments::{Error, Result};
use rand::Rng;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelSampler {
    pub weight_floor: f64,
    pub mean_range: f64,
    pub mean_gap: f64,
    pub var_min: f64,
    pub var_max: f64,
}

impl Default for ModelSampler {
    fn default() -> Self {
        ModelSampler {
            weight_floor: 0.1,
            mean_range: 5.0,
            mean_gap: 0.5,
            var_min: 0.5,
            var_max: 3.0,
        }
    }
}

impl ModelSampler {
    pub fn weights<R: Rng>(&self, k: usize, rng: &mut R) -> Result<Vec<f64>> {
        if k == 0 || self.weight_floor * k as f64 >= 1.0 {
            return Err(Error::InvalidParams(format!(
                "cannot floor {k} weights at {}",
                self.weight_floor
            )));
        }
        let e: Vec<f64> = (0..k).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
        let total: f64 = e.iter().sum();
        let free = 1.0 - self.weight_floor * k as f64;
        let mut w: Vec<f64> = e.iter().map(|v| self.weight_floor + free * v / total).collect();
        // push rounding into the largest weight so the sum is 1 to the last bit
        let s: f64 = w.iter().sum();
        let big = (0..k).max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap_or(0);
        w[big] += 1.0 - s;
        Ok(w)
    }

    /// `k` values on one coordinate with the minimum pairwise gap.
    pub fn means<R: Rng>(&self, k: usize, rng: &mut R) -> Vec<f64> {
        loop {
            let m: Vec<f64> = (0..k)
                .map(|_| rng.random_range(-self.mean_range..=self.mean_range))
                .collect();
            let ok = (0..k).all(|a| (a + 1..k).all(|b| (m[a] - m[b]).abs() >= self.mean_gap));
            if ok {
                return m;
            }
        }
    }

    pub fn variance<R: Rng>(&self, rng: &mut R) -> f64 {
        rng.random_range(self.var_min..=self.var_max)
    }

    /// Diagonal-covariance mixture in `n` dimensions.
    pub fn diagonal_model<R: Rng>(&self, k: usize, n: usize, rng: &mut R) -> Result<MixtureParams> {
        let weights = self.weights(k, rng)?;
        let mut means = vec![vec![0.0; n]; k];
        let mut vars = vec![vec![0.0; n]; k];
        for s in 0..n {
            let m = self.means(k, rng);
            for l in 0..k {
                means[l][s] = m[l];
                vars[l][s] = self.variance(rng);
            }
        }
        MixtureParams::diagonal(weights, means, vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn models_respect_the_scheme() {
        let s = ModelSampler::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for k in 1..=5 {
            let p = s.diagonal_model(k, 4, &mut rng).unwrap();
            assert!(p.is_meaningful());
            assert!(p.weights.iter().all(|&w| w >= 0.1 - 1e-15));
            for d in 0..4 {
                for a in 0..k {
                    assert!((0.5..=3.0).contains(&p.var(a, d)));
                    assert!(p.means[a][d].abs() <= 5.0);
                    for b in a + 1..k {
                        assert!((p.means[a][d] - p.means[b][d]).abs() >= 0.5);
                    }
                }
            }
        }
    }

    #[test]
    fn too_many_components_for_the_floor() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(ModelSampler::default().weights(10, &mut rng).is_err());
    }
}

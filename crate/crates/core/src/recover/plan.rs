use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::homotopy::TrackerSettings;
use crate::modelsolve::{general_path_count, ModelClass, SolveOptions};
use crate::moments::MomentKey;

/// Which pipeline a plan describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pipeline {
    /// General weights, means and covariances.
    Algorithm1,
    /// Uniform weights, one known shared covariance.
    Algorithm2,
}

/// Options shared by both pipelines.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RecoveryOptions {
    pub tracker: TrackerSettings,
    pub solve: SolveOptions,
    /// Skip the first univariate stage and use these weights.
    pub known_weights: Option<Vec<f64>>,
    /// Select the first-coordinate solution using moments of orders
    /// `3k ..= 4k − 2` instead of `3k` alone.
    pub extended_selection: bool,
    /// Weights closer than this count as equal.
    pub weight_gap: f64,
    /// Largest condition number accepted in the linear stages.
    pub max_condition: f64,
}

impl Default for RecoveryOptions {
    fn default() -> Self {
        RecoveryOptions {
            tracker: TrackerSettings::default(),
            solve: SolveOptions::default(),
            known_weights: None,
            extended_selection: false,
            weight_gap: 1e-8,
            max_condition: 1e12,
        }
    }
}

/// Moment requirements and path budget of a recovery run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryPlan {
    pub pipeline: Pipeline,
    pub k: usize,
    pub n: usize,
    /// Class solved per stage, in stage order.
    pub stage_classes: Vec<ModelClass>,
    /// Univariate moments (first set).
    pub axis_moments: Vec<MomentKey>,
    /// Moments linear in the remaining unknowns (second set).
    pub linear_moments: Vec<MomentKey>,
    /// Whether the first-coordinate general stage runs.
    pub step1: bool,
    /// Orders of `m_{c e₁}` used to pick the first-coordinate solution.
    pub selection_orders: Vec<u32>,
    pub path_budget: u128,
}

fn double_factorial_odd(m: usize) -> u128 {
    (1..=m as u128).filter(|v| v % 2 == 1).product()
}

fn factorial(m: usize) -> u128 {
    (1..=m as u128).product()
}

impl RecoveryPlan {
    pub fn algorithm1(k: usize, n: usize, options: &RecoveryOptions) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidParams("k and n must be positive".into()));
        }
        if k > 3 && !options.solve.allow_large {
            return Err(Error::Unsupported(format!("k = {k} exceeds the supported maximum of 3")));
        }
        let k32 = k as u32;
        let step1 = options.known_weights.is_none();
        let selection_orders: Vec<u32> = if !step1 {
            Vec::new()
        } else if options.extended_selection {
            (3 * k32..=(4 * k32 - 2).max(3 * k32)).collect()
        } else {
            vec![3 * k32]
        };
        let mut axis_moments = Vec::new();
        let first_max = match selection_orders.last() {
            Some(&m) => m,
            None => 2 * k32 + 1,
        };
        for c in 1..=first_max {
            axis_moments.push(MomentKey::axis(n, 0, c));
        }
        for i in 1..n {
            for c in 1..=2 * k32 + 1 {
                axis_moments.push(MomentKey::axis(n, i, c));
            }
        }
        let mut linear_moments = Vec::with_capacity(k * n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                for c in 1..=k32 {
                    linear_moments.push(MomentKey::cross(n, i, c, j));
                }
            }
        }
        let per_coord = double_factorial_odd(2 * k - 1) * factorial(k);
        let (stage_classes, path_budget) = if step1 {
            (
                vec![ModelClass::General, ModelClass::LambdaWeighted],
                general_path_count(k) + per_coord * (n as u128 - 1),
            )
        } else {
            (vec![ModelClass::LambdaWeighted], per_coord * n as u128)
        };
        Ok(RecoveryPlan {
            pipeline: Pipeline::Algorithm1,
            k,
            n,
            stage_classes,
            axis_moments,
            linear_moments,
            step1,
            selection_orders,
            path_budget,
        })
    }

    pub fn algorithm2(k: usize, n: usize) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::InvalidParams("k and n must be positive".into()));
        }
        let k32 = k as u32;
        let axis_moments = (1..=k32).map(|c| MomentKey::axis(n, 0, c)).collect();
        let mut linear_moments = Vec::new();
        for i in 1..n {
            linear_moments.push(MomentKey::axis(n, i, 1));
            for c in 1..k32 {
                linear_moments.push(MomentKey::cross(n, 0, c, i));
            }
        }
        Ok(RecoveryPlan {
            pipeline: Pipeline::Algorithm2,
            k,
            n,
            stage_classes: vec![ModelClass::KnownVarianceMeansOnly],
            axis_moments,
            linear_moments,
            step1: true,
            selection_orders: Vec::new(),
            path_budget: factorial(k),
        })
    }

    /// Every moment the plan reads.
    pub fn required_moments(&self) -> Vec<MomentKey> {
        let mut v = self.axis_moments.clone();
        v.extend(self.linear_moments.iter().cloned());
        v
    }

    /// Number of cross-covariance unknowns, `k(n² − n)/2`.
    pub fn linear_unknowns(&self) -> usize {
        match self.pipeline {
            Pipeline::Algorithm1 => self.k * (self.n * self.n - self.n) / 2,
            Pipeline::Algorithm2 => self.k * (self.n - 1),
        }
    }
}

/// Paths the plan tracks: the first-coordinate count plus
/// `(2k − 1)!! k!` per remaining coordinate for Algorithm 1; `k!` for
/// Algorithm 2.
pub fn path_count(plan: &RecoveryPlan) -> u128 {
    plan.path_budget
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn algorithm1_counts() {
        let p = RecoveryPlan::algorithm1(2, 10, &RecoveryOptions::default()).unwrap();
        assert_eq!(path_count(&p), 720 + 6 * 9);
        assert_eq!(p.linear_moments.len(), 2 * (100 - 10) / 2);
        assert_eq!(p.linear_unknowns(), p.linear_moments.len());
        assert_eq!(p.axis_moments.len(), 6 + 9 * 5);
    }

    #[test]
    fn algorithm2_counts() {
        let p = RecoveryPlan::algorithm2(3, 7).unwrap();
        assert_eq!(path_count(&p), 6);
        assert_eq!(p.linear_moments.len(), 3 * 6);
    }

    #[test]
    fn known_weights_skip_step1() {
        let o = RecoveryOptions {
            known_weights: Some(vec![0.5, 0.5]),
            ..Default::default()
        };
        let p = RecoveryPlan::algorithm1(2, 4, &o).unwrap();
        assert!(!p.step1);
        assert_eq!(path_count(&p), 6 * 4);
    }

    #[test]
    fn single_component() {
        let p = RecoveryPlan::algorithm1(1, 5, &RecoveryOptions::default()).unwrap();
        assert_eq!(path_count(&p), 6 + 4);
    }

    #[test]
    fn large_k_gated() {
        assert!(RecoveryPlan::algorithm1(4, 2, &RecoveryOptions::default()).is_err());
    }
}

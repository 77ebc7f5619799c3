use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::moments::{gaussian_multi_moment, MixtureParams, MomentKey, MomentTable};

use super::plan::Pipeline;

/// Outcome of a recovery run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecoveryReport {
    pub pipeline: Pipeline,
    pub params: MixtureParams,
    pub paths_tracked: u128,
    pub wall_time_ms: f64,
    /// Largest residual per stage. Homotopy stages report the endpoint
    /// residual of the standardized system, linear stages the relative
    /// residual of `Ax = b`, and `moments` the largest relative mismatch
    /// between the recovered model and the input moments.
    pub stage_residuals: BTreeMap<String, f64>,
    pub stage_times_ms: BTreeMap<String, f64>,
    /// Wall time of each Step-3 coordinate solve, coordinates `2..n`.
    pub coordinate_times_ms: Vec<f64>,
    /// Largest condition number met in the linear stages.
    pub max_condition: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_error: Option<f64>,
}

impl RecoveryReport {
    /// Records the normalized error against known true parameters. Diagonal
    /// truths are compared on weights, means and variances only.
    pub fn with_truth(mut self, truth: &MixtureParams) -> Self {
        self.normalized_error = Some(truth.normalized_error(&self.params, truth.is_diagonal()));
        self
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `max |m(params) − m̄| / max(1, |m̄|)` over `keys`.
pub fn moment_mismatch(params: &MixtureParams, input: &MomentTable, keys: &[MomentKey]) -> Result<f64> {
    let mut worst = 0.0f64;
    for key in keys {
        let m = input.require(key)?;
        let p: f64 = (0..params.k)
            .map(|l| params.weights[l] * gaussian_multi_moment(key, &params.means[l], &params.covariances[l]))
            .sum();
        worst = worst.max((p - m).abs() / m.abs().max(1.0));
    }
    Ok(worst)
}

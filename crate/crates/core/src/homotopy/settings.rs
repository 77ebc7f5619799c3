use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Path tracker configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerSettings {
    /// Corrector tolerance on the Newton update, relative to `1 + ‖x‖∞`.
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_step: f64,
    /// Paths with `‖x‖∞` above this are reported as diverged.
    pub divergence_norm: f64,
    /// From this `t` on, a stalled path with an ill-conditioned Jacobian is
    /// reported as singular.
    pub endgame_start: f64,
    /// Required `‖F(x)‖∞` at a converged endpoint.
    pub final_tol: f64,
    pub seed: u64,
    /// Worker threads for batch tracking; 0 uses every available core.
    pub workers: usize,
}

impl Default for TrackerSettings {
    fn default() -> Self {
        TrackerSettings {
            newton_tol: 1e-12,
            max_newton_iters: 4,
            initial_step: 0.05,
            min_step: 1e-8,
            max_step: 0.2,
            divergence_norm: 1e10,
            endgame_start: 0.9,
            final_tol: 1e-10,
            seed: 0,
            workers: 0,
        }
    }
}

/// Jacobian condition estimate above which an endpoint counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

impl TrackerSettings {
    pub fn with_seed(seed: u64) -> Self {
        TrackerSettings {
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSettings(m.to_string()));
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step && self.initial_step <= self.max_step && self.max_step < 1.0) {
            return bad("need 0 < min_step <= initial_step <= max_step < 1");
        }
        if !(self.newton_tol > 0.0 && self.final_tol > 0.0 && self.divergence_norm > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_newton_iters == 0 {
            return bad("max_newton_iters must be at least 1");
        }
        if !(0.0..=1.0).contains(&self.endgame_start) {
            return bad("endgame_start must lie in [0, 1]");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        TrackerSettings::default().validate().unwrap();
    }

    #[test]
    fn step_order_enforced() {
        let s = TrackerSettings {
            min_step: 0.1,
            initial_step: 0.05,
            ..TrackerSettings::default()
        };
        assert!(s.validate().is_err());
    }

    #[test]
    fn json_partial_config() {
        let s: TrackerSettings = serde_json::from_str(r#"{"seed": 7, "max_step": 0.1}"#).unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.max_step, 0.1);
        assert_eq!(s.final_tol, 1e-10);
    }
}

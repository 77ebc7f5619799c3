use std::path::Path;

use gmm_moments::homotopy::TrackerSettings;
use gmm_moments::modelsolve::SolveOptions;
use gmm_moments::recover::RecoveryOptions;
use gmm_moments::Result;
use serde::Deserialize;

use crate::args::GlobalArgs;

/// `--config` file: the global flags as JSON. Flags given on the command
/// line take precedence.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub seed: Option<u64>,
    pub newton_tol: Option<f64>,
    pub final_tol: Option<f64>,
    pub max_step: Option<f64>,
    pub workers: Option<usize>,
    pub allow_large: Option<bool>,
    pub extended_selection: Option<bool>,
    pub known_weights: Option<Vec<f64>>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

/// Resolved settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub tracker: TrackerSettings,
    pub solve: SolveOptions,
    pub extended_selection: bool,
    pub known_weights: Option<Vec<f64>>,
}

impl RunConfig {
    pub fn resolve(args: &GlobalArgs) -> Result<Self> {
        let file = match &args.config {
            Some(p) => ConfigFile::load(p)?,
            None => ConfigFile::default(),
        };
        let mut tracker = TrackerSettings::default();
        if let Some(v) = args.seed.or(file.seed) {
            tracker.seed = v;
        }
        if let Some(v) = args.newton_tol.or(file.newton_tol) {
            tracker.newton_tol = v;
        }
        if let Some(v) = args.final_tol.or(file.final_tol) {
            tracker.final_tol = v;
        }
        if let Some(v) = args.max_step.or(file.max_step) {
            tracker.max_step = v;
        }
        if let Some(v) = args.workers.or(file.workers) {
            tracker.workers = v;
        }
        tracker.validate()?;
        let solve = SolveOptions {
            allow_large: args.allow_large || file.allow_large.unwrap_or(false),
            ..SolveOptions::default()
        };
        Ok(RunConfig {
            tracker,
            solve,
            extended_selection: file.extended_selection.unwrap_or(false),
            known_weights: file.known_weights,
        })
    }

    pub fn recovery(&self) -> RecoveryOptions {
        RecoveryOptions {
            tracker: self.tracker.clone(),
            solve: self.solve.clone(),
            known_weights: self.known_weights.clone(),
            extended_selection: self.extended_selection,
            ..RecoveryOptions::default()
        }
    }
}

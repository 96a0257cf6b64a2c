//! Key-value run configuration. The documented keys mirror the boosting
//! hyperparameters; command-line flags override config-file values, which
//! override the defaults.

use std::path::Path;

use mvgb::HyperParams;

use crate::util::read_to_string;
use crate::{Error, Result};

/// Partial hyperparameter assignment from a config file or command line.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct HyperOverrides {
    pub n_trees: Option<usize>,
    pub shrinkage: Option<f64>,
    pub max_depth: Option<usize>,
    pub min_node_size: Option<usize>,
    pub subsample: Option<f64>,
    pub holdout_fraction: Option<f64>,
    pub seed: Option<u64>,
}

impl HyperOverrides {
    /// Applies the set fields on top of `base`.
    pub fn apply(&self, mut base: HyperParams) -> HyperParams {
        if let Some(v) = self.n_trees {
            base.n_trees = v;
        }
        if let Some(v) = self.shrinkage {
            base.shrinkage = v;
        }
        if let Some(v) = self.max_depth {
            base.max_depth = v;
        }
        if let Some(v) = self.min_node_size {
            base.min_node_size = v;
        }
        if let Some(v) = self.subsample {
            base.subsample = v;
        }
        if let Some(v) = self.holdout_fraction {
            base.holdout_fraction = v;
        }
        if let Some(v) = self.seed {
            base.seed = v;
        }
        base
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped; unknown keys are rejected.
pub fn parse_config(text: &str) -> Result<HyperOverrides> {
    let mut overrides = HyperOverrides::default();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| Error::Config {
            line: line_no,
            reason: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        let bad_value = |reason: String| Error::Config {
            line: line_no,
            reason,
        };
        match key {
            "n_trees" => {
                overrides.n_trees = Some(value.parse().map_err(|e| {
                    bad_value(format!("n_trees: {e}"))
                })?)
            }
            "shrinkage" => {
                overrides.shrinkage = Some(value.parse().map_err(|e| {
                    bad_value(format!("shrinkage: {e}"))
                })?)
            }
            "max_depth" => {
                overrides.max_depth = Some(value.parse().map_err(|e| {
                    bad_value(format!("max_depth: {e}"))
                })?)
            }
            "min_node_size" => {
                overrides.min_node_size = Some(value.parse().map_err(|e| {
                    bad_value(format!("min_node_size: {e}"))
                })?)
            }
            "subsample" => {
                overrides.subsample = Some(value.parse().map_err(|e| {
                    bad_value(format!("subsample: {e}"))
                })?)
            }
            "holdout_fraction" => {
                overrides.holdout_fraction = Some(value.parse().map_err(|e| {
                    bad_value(format!("holdout_fraction: {e}"))
                })?)
            }
            "seed" => {
                overrides.seed = Some(value.parse().map_err(|e| {
                    bad_value(format!("seed: {e}"))
                })?)
            }
            unknown => {
                return Err(Error::Config {
                    line: line_no,
                    reason: format!("unknown key '{unknown}'"),
                })
            }
        }
    }
    Ok(overrides)
}

/// Defaults, overridden by the optional config file, overridden by the flag
/// values.
pub fn resolve_hyperparams(
    config_path: Option<&Path>,
    flags: &HyperOverrides,
) -> Result<HyperParams> {
    let mut hp = HyperParams::default();
    if let Some(path) = config_path {
        let from_file = parse_config(&read_to_string(path)?)?;
        hp = from_file.apply(hp);
    }
    hp = flags.apply(hp);
    hp.validate().map_err(Error::from)?;
    Ok(hp)
}

//! Least-squares gradient boosting over multivariate regression trees.
//!
//! Responses are standardized internally, the model starts at the response
//! means (zero on the standardized scale), and every iteration fits one
//! shared tree to the current residual matrix on a seeded subsample. With an
//! L2 loss the negative gradient *is* the residual matrix, so fitting trees
//! to residuals is exact gradient boosting. A seeded holdout picks the best
//! ensemble prefix; prediction and all influence analyses use trees up to
//! that iteration only.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::dataset::{standardize_responses, Dataset, StandardizationParams};
use crate::float;
use crate::matrix::{sample_covariance, Matrix};
use crate::tree::Tree;
use crate::{Error, Result};

/// Boosting hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperParams {
    /// Number of boosting iterations.
    pub n_trees: usize,
    /// Learning rate in (0, 1].
    pub shrinkage: f64,
    /// Maximum tree depth.
    pub max_depth: usize,
    /// Minimum rows per leaf.
    pub min_node_size: usize,
    /// Fraction of training rows fed to each tree, in (0, 1].
    pub subsample: f64,
    /// Fraction of rows held out for best-iteration selection, in [0, 0.5].
    /// Zero disables selection and uses all trees.
    pub holdout_fraction: f64,
    /// Seed for the holdout split and per-iteration subsampling.
    pub seed: u64,
}

impl Default for HyperParams {
    fn default() -> Self {
        HyperParams {
            n_trees: 1000,
            shrinkage: 0.05,
            max_depth: 3,
            min_node_size: 5,
            subsample: 0.75,
            holdout_fraction: 0.2,
            seed: 0,
        }
    }
}

impl HyperParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrinkage > 0.0 && self.shrinkage <= 1.0) {
            return Err(Error::InvalidHyperParams(alloc::format!(
                "shrinkage must lie in (0, 1], got {}",
                self.shrinkage
            )));
        }
        if !(self.subsample > 0.0 && self.subsample <= 1.0) {
            return Err(Error::InvalidHyperParams(alloc::format!(
                "subsample must lie in (0, 1], got {}",
                self.subsample
            )));
        }
        if !(self.holdout_fraction >= 0.0 && self.holdout_fraction <= 0.5) {
            return Err(Error::InvalidHyperParams(alloc::format!(
                "holdout_fraction must lie in [0, 0.5], got {}",
                self.holdout_fraction
            )));
        }
        if self.min_node_size == 0 {
            return Err(Error::InvalidHyperParams(String::from(
                "min_node_size must be at least 1",
            )));
        }
        Ok(())
    }
}

/// A fitted boosted ensemble.
///
/// Prediction uses `trees[0..best_iteration]`; later trees are kept so a
/// saved model round-trips the full fit.
#[derive(Debug, Clone, PartialEq)]
pub struct BoostedModel {
    /// Standardized-scale intercept per response (zero by construction).
    pub init: Vec<f64>,
    pub trees: Vec<Tree>,
    pub shrinkage: f64,
    pub best_iteration: usize,
    pub standardization: StandardizationParams,
    /// Encoded feature column names.
    pub feature_names: Vec<String>,
    /// Encoded column -> index into `origin_names`.
    pub feature_origin: Vec<usize>,
    /// Original (pre-encoding) predictor names.
    pub origin_names: Vec<String>,
    pub response_names: Vec<String>,
}

impl BoostedModel {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn n_responses(&self) -> usize {
        self.response_names.len()
    }

    /// Predictions on the original response scale.
    pub fn predict(&self, features: &Matrix) -> Result<Matrix> {
        let standardized = self.predict_standardized(features)?;
        self.standardization.inverse(&standardized)
    }

    /// Predictions on the standardized scale, using the best-iteration
    /// ensemble prefix.
    pub fn predict_standardized(&self, features: &Matrix) -> Result<Matrix> {
        self.predict_standardized_with(features, self.best_iteration)
    }

    /// Standardized predictions from the first `n_trees` trees. Accumulates
    /// tree contributions in fit order, so predictions on the training rows
    /// reproduce the internal boosting state bit for bit.
    pub fn predict_standardized_with(&self, features: &Matrix, n_trees: usize) -> Result<Matrix> {
        if features.cols() != self.n_features() {
            return Err(Error::ShapeMismatch {
                expected: self.n_features(),
                got: features.cols(),
            });
        }
        let q = self.n_responses();
        let mut out = Matrix::zeros(features.rows(), q);
        for r in 0..features.rows() {
            let row = features.row(r);
            let mut acc = self.init.clone();
            for tree in &self.trees[..n_trees.min(self.trees.len())] {
                let leaf = tree.predict_row(row);
                for k in 0..q {
                    acc[k] += self.shrinkage * leaf[k];
                }
            }
            for k in 0..q {
                out.set(r, k, acc[k]);
            }
        }
        Ok(out)
    }
}

/// Per-iteration record of the fit, consumed by the staged-error curves and
/// by the covariance-explained attribution.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingTrace {
    /// Rows used for fitting (everything outside the holdout).
    pub train_rows: Vec<usize>,
    /// Holdout rows; empty when holdout selection is disabled.
    pub holdout_rows: Vec<usize>,
    /// Mean-only multivariate MSE on the training rows (iteration 0).
    pub baseline_train_mse: f64,
    pub baseline_holdout_mse: Option<f64>,
    /// Training multivariate MSE after each iteration.
    pub train_mse: Vec<f64>,
    /// Holdout multivariate MSE after each iteration, when enabled.
    pub holdout_mse: Option<Vec<f64>>,
    /// Residual covariance over the training rows: entry 0 is the covariance
    /// of the standardized responses, entry m the covariance after tree m.
    pub residual_cov: Vec<Matrix>,
}

impl TrainingTrace {
    pub fn n_iterations(&self) -> usize {
        self.train_mse.len()
    }

    /// Training-error curve (one entry per iteration; empty for a
    /// zero-iteration model, whose error is the mean-only baseline).
    pub fn train_curve(&self) -> &[f64] {
        &self.train_mse
    }

    pub fn holdout_curve(&self) -> Option<&[f64]> {
        self.holdout_mse.as_deref()
    }
}

/// Multivariate MSE: mean over the given rows and all responses of the
/// squared standardized-scale error.
fn mv_mse(y: &Matrix, f: &Matrix, rows: &[usize]) -> f64 {
    let q = y.cols();
    let mut total = 0.0;
    for &r in rows {
        for k in 0..q {
            let d = y.get(r, k) - f.get(r, k);
            total += d * d;
        }
    }
    total / (rows.len() * q) as f64
}

/// Fits a boosted model. Deterministic: identical dataset, hyperparameters
/// and seed produce a bitwise-identical model and trace.
pub fn fit(d: &Dataset, hp: &HyperParams) -> Result<(BoostedModel, TrainingTrace)> {
    hp.validate()?;
    let n = d.n_rows();
    if n < 10 {
        return Err(Error::TooFewRows { needed: 10, got: n });
    }

    let (d_std, params) = standardize_responses(d)?;
    let y_std = d_std.responses();
    let x = d.features();
    let q = d.n_responses();

    let mut rng = ChaCha12Rng::seed_from_u64(hp.seed);

    let (train_rows, holdout_rows) = if hp.holdout_fraction > 0.0 {
        let n_holdout = float::round(hp.holdout_fraction * n as f64) as usize;
        if n_holdout < 2 || n - n_holdout < 2 {
            return Err(Error::DegenerateHoldout {
                n_train: n - n_holdout,
                n_holdout,
            });
        }
        let mut idx: Vec<usize> = (0..n).collect();
        idx.shuffle(&mut rng);
        let mut holdout: Vec<usize> = idx[..n_holdout].to_vec();
        let mut train: Vec<usize> = idx[n_holdout..].to_vec();
        holdout.sort_unstable();
        train.sort_unstable();
        (train, holdout)
    } else {
        ((0..n).collect(), Vec::new())
    };
    let use_holdout = !holdout_rows.is_empty();

    let mut f = Matrix::zeros(n, q);
    let baseline_train_mse = mv_mse(y_std, &f, &train_rows);
    let baseline_holdout_mse = use_holdout.then(|| mv_mse(y_std, &f, &holdout_rows));

    let mut trees: Vec<Tree> = Vec::with_capacity(hp.n_trees);
    let mut train_mse = Vec::with_capacity(hp.n_trees);
    let mut holdout_mse = use_holdout.then(|| Vec::with_capacity(hp.n_trees));
    let mut residual_cov = Vec::with_capacity(hp.n_trees + 1);

    let residuals = y_std.sub(&f)?;
    residual_cov.push(sample_covariance(&residuals, &train_rows));

    let subsample_size = float::ceil(hp.subsample * train_rows.len() as f64) as usize;

    for _ in 0..hp.n_trees {
        let residuals = y_std.sub(&f)?;

        let sample_rows: Vec<usize> = if subsample_size >= train_rows.len() {
            train_rows.clone()
        } else {
            rand::seq::index::sample(&mut rng, train_rows.len(), subsample_size)
                .iter()
                .map(|i| train_rows[i])
                .collect()
        };

        let tree = Tree::fit_on_rows(x, &residuals, &sample_rows, hp.max_depth, hp.min_node_size)?;

        for r in 0..n {
            let leaf = tree.predict_row(x.row(r));
            for k in 0..q {
                let v = f.get(r, k) + hp.shrinkage * leaf[k];
                f.set(r, k, v);
            }
        }

        train_mse.push(mv_mse(y_std, &f, &train_rows));
        if let Some(curve) = holdout_mse.as_mut() {
            curve.push(mv_mse(y_std, &f, &holdout_rows));
        }
        let new_residuals = y_std.sub(&f)?;
        residual_cov.push(sample_covariance(&new_residuals, &train_rows));
        trees.push(tree);
    }

    // Best prefix by holdout error; iteration 0 is the mean-only model. Ties
    // resolve to the shortest prefix.
    let best_iteration = match (&holdout_mse, baseline_holdout_mse) {
        (Some(curve), Some(baseline)) => {
            let mut best_m = 0;
            let mut best_err = baseline;
            for (i, &err) in curve.iter().enumerate() {
                if err < best_err {
                    best_err = err;
                    best_m = i + 1;
                }
            }
            best_m
        }
        _ => hp.n_trees,
    };

    let model = BoostedModel {
        init: vec![0.0; q],
        trees,
        shrinkage: hp.shrinkage,
        best_iteration,
        standardization: params,
        feature_names: d.feature_names().to_vec(),
        feature_origin: d.feature_origin().to_vec(),
        origin_names: d.origin_names().to_vec(),
        response_names: d.response_names().to_vec(),
    };
    let trace = TrainingTrace {
        train_rows,
        holdout_rows,
        baseline_train_mse,
        baseline_holdout_mse,
        train_mse,
        holdout_mse,
        residual_cov,
    };
    Ok((model, trace))
}

//! Holdout evaluation, joint-vs-univariate model comparison, and what-if
//! scenario analysis on fitted models.

use alloc::string::String;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::boosting::{fit, BoostedModel, HyperParams};
use crate::dataset::Dataset;
use crate::float;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Out-of-sample error of one response.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseEval {
    pub name: String,
    /// Test MSE on the standardized scale.
    pub mse: f64,
    /// 1 − SSE/SST with SST about the test-set mean.
    pub r2: f64,
}

/// Result of a seeded 80/20 train/test evaluation.
///
/// The observed/predicted matrices hold the test rows on the standardized
/// scale (the same convention the reported MSE uses) for plotting exports.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub per_response: Vec<ResponseEval>,
    pub n_train: usize,
    pub n_test: usize,
    pub split_seed: u64,
    pub test_rows: Vec<usize>,
    pub observed_std: Matrix,
    pub predicted_std: Matrix,
}

/// Per-response errors of the joint fit against `Q` separate single-response
/// fits run with identical hyperparameters, split and seeds.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseComparison {
    pub name: String,
    pub mse_multi: f64,
    pub mse_uni: f64,
    pub r2_multi: f64,
    pub r2_uni: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub per_response: Vec<ResponseComparison>,
    pub n_train: usize,
    pub n_test: usize,
    pub split_seed: u64,
}

/// A what-if intervention: set the named encoded feature columns to fixed
/// values across all rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Intervention {
    pub assignments: Vec<(String, f64)>,
}

impl Intervention {
    pub fn set(feature: impl Into<String>, value: f64) -> Self {
        Intervention {
            assignments: alloc::vec![(feature.into(), value)],
        }
    }
}

/// Predicted-mean shift of one response under an intervention.
/// `percent_change` is `None` when the baseline mean is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioDelta {
    pub response_name: String,
    pub baseline_mean: f64,
    pub scenario_mean: f64,
    pub percent_change: Option<f64>,
}

/// Seeded shuffle split: `round(0.2·n)` test rows, the rest training.
fn split_indices(n: usize, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut rng = ChaCha12Rng::seed_from_u64(split_seed);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng);
    let n_test = float::round(0.2 * n as f64) as usize;
    let mut test: Vec<usize> = idx[..n_test].to_vec();
    let mut train: Vec<usize> = idx[n_test..].to_vec();
    test.sort_unstable();
    train.sort_unstable();
    (train, test)
}

/// Fits on a seeded 80% split and reports per-response test MSE
/// (standardized scale) and R² on the held-out 20%. The split is distinct
/// from the model's internal holdout, which is carved from the training part.
pub fn evaluate(d: &Dataset, hp: &HyperParams, split_seed: u64) -> Result<EvalReport> {
    let n = d.n_rows();
    if n < 20 {
        return Err(Error::TooFewRows { needed: 20, got: n });
    }
    let (train_rows, test_rows) = split_indices(n, split_seed);
    let d_train = d.subset_rows(&train_rows);
    let (model, _) = fit(&d_train, hp)?;
    let x_test = d.features().select_rows(&test_rows);
    let y_test = d.responses().select_rows(&test_rows);

    let observed_std = model.standardization.standardize(&y_test)?;
    let predicted_std = model.predict_standardized(&x_test)?;

    let q = d.n_responses();
    let n_test = test_rows.len();
    let mut per_response = Vec::with_capacity(q);
    for k in 0..q {
        let mut sse = 0.0;
        let mut mean_obs = 0.0;
        for r in 0..n_test {
            let d_err = observed_std.get(r, k) - predicted_std.get(r, k);
            sse += d_err * d_err;
            mean_obs += observed_std.get(r, k);
        }
        mean_obs /= n_test as f64;
        let sst: f64 = (0..n_test)
            .map(|r| {
                let dev = observed_std.get(r, k) - mean_obs;
                dev * dev
            })
            .sum();
        per_response.push(ResponseEval {
            name: d.response_names()[k].clone(),
            mse: sse / n_test as f64,
            r2: 1.0 - sse / sst,
        });
    }

    Ok(EvalReport {
        per_response,
        n_train: train_rows.len(),
        n_test,
        split_seed,
        test_rows,
        observed_std,
        predicted_std,
    })
}

/// Evaluates the joint model, then one single-response model per response
/// with the same hyperparameters, split and seeds, so the only varying
/// factor is joint versus separate fitting. With a single response the two
/// paths are the same computation and the reported errors coincide.
pub fn compare_models(d: &Dataset, hp: &HyperParams, split_seed: u64) -> Result<ComparisonReport> {
    let joint = evaluate(d, hp, split_seed)?;
    let mut per_response = Vec::with_capacity(d.n_responses());
    for k in 0..d.n_responses() {
        let single = evaluate(&d.select_response(k), hp, split_seed)?;
        per_response.push(ResponseComparison {
            name: d.response_names()[k].clone(),
            mse_multi: joint.per_response[k].mse,
            mse_uni: single.per_response[0].mse,
            r2_multi: joint.per_response[k].r2,
            r2_uni: single.per_response[0].r2,
        });
    }
    Ok(ComparisonReport {
        per_response,
        n_train: joint.n_train,
        n_test: joint.n_test,
        split_seed,
    })
}

/// Applies each intervention to a copy of `features`, predicts, and reports
/// the per-response mean change against the shared baseline predictions.
pub fn scenario_compare(
    model: &BoostedModel,
    features: &Matrix,
    interventions: &[Intervention],
) -> Result<Vec<Vec<ScenarioDelta>>> {
    let baseline = model.predict(features)?;
    let baseline_means = crate::matrix::column_means(&baseline);

    let mut results = Vec::with_capacity(interventions.len());
    for intervention in interventions {
        let mut modified = features.clone();
        for (name, value) in &intervention.assignments {
            let col = model
                .feature_names
                .iter()
                .position(|n| n == name)
                .ok_or_else(|| Error::UnknownFeature { name: name.clone() })?;
            if !value.is_finite() {
                return Err(Error::NonFiniteValue {
                    context: alloc::format!("intervention on '{name}'"),
                });
            }
            for r in 0..modified.rows() {
                modified.set(r, col, *value);
            }
        }
        let scenario = model.predict(&modified)?;
        let scenario_means = crate::matrix::column_means(&scenario);
        let deltas = (0..model.n_responses())
            .map(|k| {
                let baseline_mean = baseline_means[k];
                let scenario_mean = scenario_means[k];
                let percent_change = (baseline_mean != 0.0).then(|| {
                    100.0 * (scenario_mean - baseline_mean) / float::abs(baseline_mean)
                });
                ScenarioDelta {
                    response_name: model.response_names[k].clone(),
                    baseline_mean,
                    scenario_mean,
                    percent_change,
                }
            })
            .collect();
        results.push(deltas);
    }
    Ok(results)
}

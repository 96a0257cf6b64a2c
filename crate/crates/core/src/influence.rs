//! Attribution of the fitted ensemble's error reduction back to the
//! predictors: per-response relative influence, a global importance ranking,
//! and per-response-pair attribution of residual-covariance reduction.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::boosting::{BoostedModel, TrainingTrace};
use crate::matrix::Matrix;
use crate::tree::Node;
use crate::{Error, Result};

/// Per-predictor, per-response share of the ensemble's error reduction, in
/// percent. Rows follow the original (pre-encoding) predictors; every column
/// sums to 100, or is all-zero for a model with no splits.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceMatrix {
    pub values: Matrix,
    pub feature_names: Vec<String>,
    pub response_names: Vec<String>,
}

/// Per-predictor attribution of the reduction in residual covariance for
/// every response pair `(i, j)` with `i <= j` (diagonal pairs carry variance
/// explained, so a single-response model degenerates to relative influence).
#[derive(Debug, Clone, PartialEq)]
pub struct PairInfluenceTensor {
    /// P_orig × Q·(Q+1)/2, signed.
    pub values: Matrix,
    /// Response-index pairs, `(i, j)` with `i <= j`, in column order.
    pub pair_indices: Vec<(usize, usize)>,
    pub feature_names: Vec<String>,
    pub response_names: Vec<String>,
}

impl PairInfluenceTensor {
    pub fn n_pairs(&self) -> usize {
        self.pair_indices.len()
    }

    /// Human-readable column label for pair `k`, e.g. `y1~y2`.
    pub fn pair_label(&self, k: usize) -> String {
        let (i, j) = self.pair_indices[k];
        format!("{}~{}", self.response_names[i], self.response_names[j])
    }

    pub fn pair_labels(&self) -> Vec<String> {
        (0..self.n_pairs()).map(|k| self.pair_label(k)).collect()
    }
}

/// Signed per-encoded-feature, per-response gain sums over the trees the
/// model actually uses, floored at zero per encoded feature.
fn encoded_influence(model: &BoostedModel) -> Matrix {
    let p = model.n_features();
    let q = model.n_responses();
    let mut raw = Matrix::zeros(p, q);
    for tree in &model.trees[..model.best_iteration] {
        for node in tree.nodes() {
            if let Node::Internal { rule, .. } = node {
                for k in 0..q {
                    let v = raw.get(rule.feature, k) + rule.per_response_gain[k];
                    raw.set(rule.feature, k, v);
                }
            }
        }
    }
    for f in 0..p {
        for k in 0..q {
            if raw.get(f, k) < 0.0 {
                raw.set(f, k, 0.0);
            }
        }
    }
    raw
}

/// Aggregates encoded columns onto the original predictors via the model's
/// origin map.
fn aggregate_by_origin(model: &BoostedModel, encoded: &Matrix) -> Matrix {
    let q = encoded.cols();
    let mut agg = Matrix::zeros(model.origin_names.len(), q);
    for (enc, &origin) in model.feature_origin.iter().enumerate() {
        for k in 0..q {
            let v = agg.get(origin, k) + encoded.get(enc, k);
            agg.set(origin, k, v);
        }
    }
    agg
}

/// Relative influence of every original predictor on every response: the
/// predictor's share of the summed split gains across the trees up to the
/// best iteration, normalized to percent per response column.
pub fn relative_influence(model: &BoostedModel) -> InfluenceMatrix {
    let q = model.n_responses();
    let mut values = aggregate_by_origin(model, &encoded_influence(model));
    for k in 0..q {
        let total: f64 = (0..values.rows()).map(|f| values.get(f, k)).sum();
        if total > 0.0 {
            for f in 0..values.rows() {
                values.set(f, k, 100.0 * values.get(f, k) / total);
            }
        }
    }
    InfluenceMatrix {
        values,
        feature_names: model.origin_names.clone(),
        response_names: model.response_names.clone(),
    }
}

/// Global importance: per-predictor influence summed over all responses,
/// rescaled to sum 100, sorted descending. Ties break by name.
pub fn global_importance(infl: &InfluenceMatrix) -> Vec<(String, f64)> {
    let p = infl.values.rows();
    let q = infl.values.cols();
    let mut scores: Vec<(String, f64)> = (0..p)
        .map(|f| {
            let s: f64 = (0..q).map(|k| infl.values.get(f, k)).sum();
            (infl.feature_names[f].clone(), s)
        })
        .collect();
    let total: f64 = scores.iter().map(|(_, s)| s).sum();
    if total > 0.0 {
        for (_, s) in &mut scores {
            *s = 100.0 * *s / total;
        }
    }
    scores.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    scores
}

/// Column order for response pairs: (0,0), (0,1), …, (0,Q−1), (1,1), …
pub fn response_pairs(q: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(q * (q + 1) / 2);
    for i in 0..q {
        for j in i..q {
            pairs.push((i, j));
        }
    }
    pairs
}

/// Attributes each iteration's residual-covariance reduction to the original
/// predictors, proportionally to each predictor's share of that tree's total
/// split gain, summed over the trees up to the best iteration.
///
/// The attribution preserves totals: for every pair, summing the column over
/// predictors reproduces the total covariance reduction between the
/// standardized responses and the final residuals.
pub fn covariance_explained(
    model: &BoostedModel,
    trace: &TrainingTrace,
) -> Result<PairInfluenceTensor> {
    let q = model.n_responses();
    if trace.residual_cov.len() < model.best_iteration + 1 {
        return Err(Error::MissingTrace(format!(
            "need {} covariance records, trace has {}",
            model.best_iteration + 1,
            trace.residual_cov.len()
        )));
    }
    if trace.residual_cov[0].cols() != q {
        return Err(Error::MissingTrace(format!(
            "trace covariances are {}-dimensional, model has {} responses",
            trace.residual_cov[0].cols(),
            q
        )));
    }

    let pairs = response_pairs(q);
    let p_orig = model.origin_names.len();
    let mut values = Matrix::zeros(p_orig, pairs.len());

    for m in 1..=model.best_iteration {
        let tree = &model.trees[m - 1];
        let encoded_gains = tree.gain_by_feature(model.n_features());
        let mut origin_gains = vec![0.0; p_orig];
        for (enc, &origin) in model.feature_origin.iter().enumerate() {
            origin_gains[origin] += encoded_gains[enc];
        }
        let total: f64 = origin_gains.iter().sum();
        if total <= 0.0 {
            // Single-leaf tree: it only shifts residuals by a constant, so
            // the covariance change is zero and there is nothing to share.
            continue;
        }
        let before = &trace.residual_cov[m - 1];
        let after = &trace.residual_cov[m];
        for (col, &(i, j)) in pairs.iter().enumerate() {
            let delta = before.get(i, j) - after.get(i, j);
            for f in 0..p_orig {
                let v = values.get(f, col) + origin_gains[f] / total * delta;
                values.set(f, col, v);
            }
        }
    }

    Ok(PairInfluenceTensor {
        values,
        pair_indices: pairs,
        feature_names: model.origin_names.clone(),
        response_names: model.response_names.clone(),
    })
}

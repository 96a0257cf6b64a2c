//! In-memory dataset: an encoded feature matrix plus a matrix of correlated
//! responses, with the bookkeeping that maps one-hot indicator columns back to
//! their source columns.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::matrix::{column_means, column_sds, Matrix};
use crate::{Error, Result};

/// A fully numeric dataset ready for fitting.
///
/// `features` holds the encoded predictor columns (numeric columns passed
/// through, categorical columns expanded to one indicator per observed level).
/// `feature_origin[k]` is the index into `origin_names` of the source column
/// that encoded column `k` came from, so influence can be re-aggregated onto
/// the original predictors.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    features: Matrix,
    responses: Matrix,
    feature_names: Vec<String>,
    feature_origin: Vec<usize>,
    origin_names: Vec<String>,
    response_names: Vec<String>,
}

impl Dataset {
    /// Validates shapes, finiteness and the one-hot partition-of-unity
    /// invariant, then assembles the dataset.
    pub fn new(
        features: Matrix,
        responses: Matrix,
        feature_names: Vec<String>,
        feature_origin: Vec<usize>,
        origin_names: Vec<String>,
        response_names: Vec<String>,
    ) -> Result<Self> {
        let n = features.rows();
        let p = features.cols();
        let q = responses.cols();
        if n < 2 {
            return Err(Error::EmptyDataset);
        }
        if responses.rows() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: responses.rows(),
            });
        }
        if p == 0 || q == 0 {
            return Err(Error::InvalidDataset(String::from(
                "need at least one feature and one response column",
            )));
        }
        if feature_names.len() != p || feature_origin.len() != p {
            return Err(Error::InvalidDataset(String::from(
                "feature names/origin length must match feature count",
            )));
        }
        if response_names.len() != q {
            return Err(Error::InvalidDataset(String::from(
                "response names length must match response count",
            )));
        }
        if !features.is_finite() {
            return Err(Error::NonFiniteValue {
                context: String::from("feature matrix"),
            });
        }
        if !responses.is_finite() {
            return Err(Error::NonFiniteValue {
                context: String::from("response matrix"),
            });
        }
        if let Some(&bad) = feature_origin.iter().find(|&&o| o >= origin_names.len()) {
            return Err(Error::InvalidDataset(format!(
                "feature origin {bad} out of range for {} source columns",
                origin_names.len()
            )));
        }
        // Indicator groups (origin shared by 2+ encoded columns) must sum to 1
        // within every row.
        for origin in 0..origin_names.len() {
            let group: Vec<usize> = (0..p).filter(|&k| feature_origin[k] == origin).collect();
            if group.len() < 2 {
                continue;
            }
            for r in 0..n {
                let sum: f64 = group.iter().map(|&k| features.get(r, k)).sum();
                if crate::float::abs(sum - 1.0) > 1e-9 {
                    return Err(Error::InvalidDataset(format!(
                        "one-hot group '{}' sums to {sum} in row {r}",
                        origin_names[origin]
                    )));
                }
            }
        }
        Ok(Dataset {
            features,
            responses,
            feature_names,
            feature_origin,
            origin_names,
            response_names,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.features.rows()
    }

    pub fn n_features(&self) -> usize {
        self.features.cols()
    }

    pub fn n_responses(&self) -> usize {
        self.responses.cols()
    }

    pub fn features(&self) -> &Matrix {
        &self.features
    }

    pub fn responses(&self) -> &Matrix {
        &self.responses
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn feature_origin(&self) -> &[usize] {
        &self.feature_origin
    }

    pub fn origin_names(&self) -> &[String] {
        &self.origin_names
    }

    pub fn response_names(&self) -> &[String] {
        &self.response_names
    }

    /// Same features, single response column `q`.
    pub fn select_response(&self, q: usize) -> Dataset {
        let mut responses = Matrix::zeros(self.n_rows(), 1);
        for r in 0..self.n_rows() {
            responses.set(r, 0, self.responses.get(r, q));
        }
        Dataset {
            features: self.features.clone(),
            responses,
            feature_names: self.feature_names.clone(),
            feature_origin: self.feature_origin.clone(),
            origin_names: self.origin_names.clone(),
            response_names: alloc::vec![self.response_names[q].clone()],
        }
    }

    /// Row subset in the given order. The caller is responsible for keeping
    /// at least two rows.
    pub fn subset_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            features: self.features.select_rows(rows),
            responses: self.responses.select_rows(rows),
            feature_names: self.feature_names.clone(),
            feature_origin: self.feature_origin.clone(),
            origin_names: self.origin_names.clone(),
            response_names: self.response_names.clone(),
        }
    }

    /// Same dataset with the response matrix replaced (used internally for
    /// standardization).
    pub(crate) fn with_responses(&self, responses: Matrix) -> Dataset {
        Dataset {
            features: self.features.clone(),
            responses,
            feature_names: self.feature_names.clone(),
            feature_origin: self.feature_origin.clone(),
            origin_names: self.origin_names.clone(),
            response_names: self.response_names.clone(),
        }
    }
}

/// Per-response affine transform retained for undoing standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardizationParams {
    pub response_means: Vec<f64>,
    pub response_sds: Vec<f64>,
}

impl StandardizationParams {
    /// Identity transform for `q` responses (mean 0, sd 1).
    pub fn identity(q: usize) -> Self {
        StandardizationParams {
            response_means: alloc::vec![0.0; q],
            response_sds: alloc::vec![1.0; q],
        }
    }

    pub fn n_responses(&self) -> usize {
        self.response_means.len()
    }

    /// (y − mean) / sd, column by column.
    pub fn standardize(&self, responses: &Matrix) -> Result<Matrix> {
        self.check(responses)?;
        let mut out = responses.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out.set(r, c, (responses.get(r, c) - self.response_means[c]) / self.response_sds[c]);
            }
        }
        Ok(out)
    }

    /// y·sd + mean, column by column.
    pub fn inverse(&self, standardized: &Matrix) -> Result<Matrix> {
        self.check(standardized)?;
        let mut out = standardized.clone();
        for r in 0..out.rows() {
            for c in 0..out.cols() {
                out.set(r, c, standardized.get(r, c) * self.response_sds[c] + self.response_means[c]);
            }
        }
        Ok(out)
    }

    fn check(&self, m: &Matrix) -> Result<()> {
        if m.cols() != self.response_means.len() {
            return Err(Error::ShapeMismatch {
                expected: self.response_means.len(),
                got: m.cols(),
            });
        }
        Ok(())
    }
}

/// Rescales every response column to mean 0 and sample sd 1, returning the
/// standardized dataset together with the parameters needed to invert the
/// transform. Rejects constant responses.
pub fn standardize_responses(d: &Dataset) -> Result<(Dataset, StandardizationParams)> {
    let means = column_means(d.responses());
    let sds = column_sds(d.responses());
    for (q, sd) in sds.iter().enumerate() {
        if !sd.is_finite() || *sd <= 0.0 {
            return Err(Error::ConstantResponse {
                name: d.response_names()[q].clone(),
            });
        }
    }
    let params = StandardizationParams {
        response_means: means,
        response_sds: sds,
    };
    let standardized = params.standardize(d.responses())?;
    Ok((d.with_responses(standardized), params))
}

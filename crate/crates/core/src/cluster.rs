//! Manhattan distance matrices and agglomerative hierarchical clustering,
//! used to group predictors that explain similar covariance trends and
//! response pairs that depend on similar predictors.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::float;
use crate::matrix::Matrix;
use crate::{Error, Result};

/// Symmetric pairwise distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    values: Matrix,
}

impl DistanceMatrix {
    /// Validates symmetry, zero diagonal and nonnegativity.
    pub fn new(labels: Vec<String>, values: Matrix) -> Result<Self> {
        let k = labels.len();
        if values.rows() != k || values.cols() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: values.rows(),
            });
        }
        for i in 0..k {
            if values.get(i, i) != 0.0 {
                return Err(Error::InvalidDataset(alloc::format!(
                    "distance diagonal entry {i} is {}",
                    values.get(i, i)
                )));
            }
            for j in 0..k {
                let v = values.get(i, j);
                if v.is_nan() || v < 0.0 {
                    return Err(Error::InvalidDataset(alloc::format!(
                        "negative or NaN distance at ({i},{j})"
                    )));
                }
                if float::abs(v - values.get(j, i)) > 1e-9 {
                    return Err(Error::InvalidDataset(alloc::format!(
                        "asymmetric distances at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { labels, values })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &Matrix {
        &self.values
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.values.get(a, b)
    }
}

/// Pairwise Manhattan (L1) distances between the rows of `vectors`.
pub fn manhattan_distances(vectors: &Matrix, labels: &[String]) -> Result<DistanceMatrix> {
    let k = vectors.rows();
    if k < 2 {
        return Err(Error::TooFewItems { needed: 2, got: k });
    }
    if labels.len() != k {
        return Err(Error::DimensionMismatch {
            expected: k,
            got: labels.len(),
        });
    }
    let mut values = Matrix::zeros(k, k);
    for a in 0..k {
        for b in a + 1..k {
            let d: f64 = vectors
                .row(a)
                .iter()
                .zip(vectors.row(b))
                .map(|(x, y)| float::abs(x - y))
                .sum();
            values.set(a, b, d);
            values.set(b, a, d);
        }
    }
    DistanceMatrix::new(labels.to_vec(), values)
}

/// Linkage criterion for agglomerative clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Linkage {
    /// Merge the pair with the smallest maximum inter-point distance.
    #[default]
    Complete,
    Single,
    Average,
}

/// One agglomeration step. Cluster ids follow the usual stepwise convention:
/// ids `0..K` are the original items, and the cluster created by merge `t`
/// gets id `K + t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    pub height: f64,
}

/// Stepwise dendrogram: exactly `K − 1` merges over `K` labelled items.
#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub merges: Vec<Merge>,
    pub labels: Vec<String>,
}

/// Agglomerative hierarchical clustering over a distance matrix.
///
/// Repeatedly merges the two clusters with minimal linkage distance. Ties
/// break toward the pair with the smallest ids (first by the smaller id,
/// then by the second), which makes the result deterministic.
pub fn hierarchical_cluster(d: &DistanceMatrix, linkage: Linkage) -> Result<Dendrogram> {
    let k = d.len();
    if k < 2 {
        return Err(Error::TooFewItems { needed: 2, got: k });
    }

    // Active clusters in ascending-id order: new ids only grow, so pushing
    // merged clusters at the back preserves the order.
    let mut active: Vec<(usize, Vec<usize>)> = (0..k).map(|i| (i, vec![i])).collect();
    let mut merges = Vec::with_capacity(k - 1);

    for step in 0..k - 1 {
        let mut best: Option<(usize, usize, f64)> = None; // (pos_a, pos_b, dist)
        for a in 0..active.len() {
            for b in a + 1..active.len() {
                let dist = linkage_distance(d, &active[a].1, &active[b].1, linkage);
                if best.is_none_or(|(_, _, cur)| dist < cur) {
                    best = Some((a, b, dist));
                }
            }
        }
        let (pos_a, pos_b, height) = best.expect("at least one active pair");
        let (id_a, members_a) = active[pos_a].clone();
        let (id_b, members_b) = active[pos_b].clone();
        merges.push(Merge {
            cluster_a: id_a,
            cluster_b: id_b,
            height,
        });
        // Remove the higher position first so the lower index stays valid.
        active.remove(pos_b);
        active.remove(pos_a);
        let mut members = members_a;
        members.extend(members_b);
        active.push((k + step, members));
    }

    Ok(Dendrogram {
        merges,
        labels: d.labels().to_vec(),
    })
}

fn linkage_distance(d: &DistanceMatrix, a: &[usize], b: &[usize], linkage: Linkage) -> f64 {
    match linkage {
        Linkage::Complete => {
            let mut max = 0.0f64;
            for &i in a {
                for &j in b {
                    max = max.max(d.get(i, j));
                }
            }
            max
        }
        Linkage::Single => {
            let mut min = f64::INFINITY;
            for &i in a {
                for &j in b {
                    min = min.min(d.get(i, j));
                }
            }
            min
        }
        Linkage::Average => {
            let mut sum = 0.0;
            for &i in a {
                for &j in b {
                    sum += d.get(i, j);
                }
            }
            sum / (a.len() * b.len()) as f64
        }
    }
}

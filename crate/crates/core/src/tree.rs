//! Multivariate regression trees: greedy recursive partitioning that
//! minimises the summed within-node squared error across all responses, with
//! vector-valued leaves and per-response gain recorded on every split.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::matrix::Matrix;
use crate::{Error, Result};

/// Minimum summed gain for a split to be accepted; absorbs floating-point
/// noise on constant targets.
pub const GAIN_FLOOR: f64 = 1e-12;

/// Two candidate gains within this relative band count as equal and fall
/// through to the lowest-feature, lowest-threshold tie-break. Distinct
/// features often induce the same row partition, whose gains agree exactly
/// in real arithmetic but differ by accumulation noise in floats; without
/// the band the winner would depend on that noise.
fn tie_epsilon(gain: f64) -> f64 {
    1e-9 * crate::float::abs(gain).max(1.0)
}

/// An accepted split: feature, threshold and the error reduction it achieved,
/// both summed and per response.
///
/// `total_gain` is the summed reduction and is nonnegative; individual
/// `per_response_gain` entries are stored as computed and may be negative (a
/// split can increase one response's error while decreasing the sum).
#[derive(Debug, Clone, PartialEq)]
pub struct SplitRule {
    pub feature: usize,
    pub threshold: f64,
    pub total_gain: f64,
    pub per_response_gain: Vec<f64>,
}

/// One node of a fitted tree. Children are indices into the tree's node
/// array; the root is node 0.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Internal {
        rule: SplitRule,
        left: usize,
        right: usize,
    },
    Leaf {
        value: Vec<f64>,
    },
}

/// A fitted multivariate regression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct Tree {
    nodes: Vec<Node>,
    depth: usize,
}

impl Tree {
    /// Fits a tree on all rows of `features`/`targets`.
    pub fn fit(
        features: &Matrix,
        targets: &Matrix,
        max_depth: usize,
        min_node_size: usize,
    ) -> Result<Tree> {
        let rows: Vec<usize> = (0..features.rows()).collect();
        Tree::fit_on_rows(features, targets, &rows, max_depth, min_node_size)
    }

    /// Fits a tree on a row subset.
    ///
    /// The rows are first put into a canonical order (lexicographic over the
    /// row's feature values, then its target values), so the fitted tree is a
    /// function of the row *multiset*: permuting the input rows, or handing
    /// the same subset in a different order, yields a bitwise-identical tree.
    pub fn fit_on_rows(
        features: &Matrix,
        targets: &Matrix,
        rows: &[usize],
        max_depth: usize,
        min_node_size: usize,
    ) -> Result<Tree> {
        if rows.is_empty() || features.rows() == 0 {
            return Err(Error::EmptyInput);
        }
        if targets.rows() != features.rows() {
            return Err(Error::DimensionMismatch {
                expected: features.rows(),
                got: targets.rows(),
            });
        }
        let ordered = canonical_order(features, targets, rows);
        let mut nodes = Vec::new();
        let depth = build(
            features,
            targets,
            ordered,
            0,
            max_depth,
            min_node_size.max(1),
            &mut nodes,
        );
        Ok(Tree { nodes, depth })
    }

    /// Reassembles a tree from a node array (deserialization path),
    /// validating that the array encodes a single well-formed binary tree.
    pub fn from_nodes(nodes: Vec<Node>) -> Result<Tree> {
        if nodes.is_empty() {
            return Err(Error::InvalidModel(String::from("tree has no nodes")));
        }
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![(0usize, 0usize)];
        let mut depth = 0;
        let mut visited = 0;
        while let Some((idx, d)) = stack.pop() {
            if idx >= nodes.len() {
                return Err(Error::InvalidModel(String::from("child index out of range")));
            }
            if seen[idx] {
                return Err(Error::InvalidModel(String::from("node referenced twice")));
            }
            seen[idx] = true;
            visited += 1;
            match &nodes[idx] {
                Node::Leaf { .. } => depth = depth.max(d),
                Node::Internal { left, right, .. } => {
                    stack.push((*left, d + 1));
                    stack.push((*right, d + 1));
                }
            }
        }
        if visited != nodes.len() {
            return Err(Error::InvalidModel(String::from("unreachable nodes present")));
        }
        Ok(Tree { nodes, depth })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    /// Longest root-to-leaf path, in edges. A lone leaf has depth 0.
    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Number of responses predicted per leaf.
    pub fn n_responses(&self) -> usize {
        self.nodes
            .iter()
            .find_map(|n| match n {
                Node::Leaf { value } => Some(value.len()),
                Node::Internal { .. } => None,
            })
            .unwrap_or(0)
    }

    /// Routes a feature row to its leaf and returns the leaf's value.
    /// Ties (`x == threshold`) go left.
    pub fn predict_row(&self, x: &[f64]) -> &[f64] {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Leaf { value } => return value,
                Node::Internal { rule, left, right } => {
                    idx = if x[rule.feature] <= rule.threshold {
                        *left
                    } else {
                        *right
                    };
                }
            }
        }
    }

    /// Summed per-feature `total_gain` over all internal nodes.
    pub fn gain_by_feature(&self, n_features: usize) -> Vec<f64> {
        let mut gains = vec![0.0; n_features];
        for node in &self.nodes {
            if let Node::Internal { rule, .. } = node {
                gains[rule.feature] += rule.total_gain;
            }
        }
        gains
    }
}

/// Finds the (feature, threshold) split of the given rows maximising the
/// summed per-response error reduction
/// `Σ_q [SSE_q(parent) − SSE_q(left) − SSE_q(right)]`.
///
/// Candidate thresholds are midpoints between consecutive distinct sorted
/// feature values; both children must keep at least `min_node_size` rows.
/// Returns `None` when no admissible split has gain above [`GAIN_FLOOR`].
/// Ties are broken toward the lowest feature index, then lowest threshold.
pub fn find_best_split(
    features: &Matrix,
    targets: &Matrix,
    rows: &[usize],
    min_node_size: usize,
) -> Option<SplitRule> {
    let ordered = canonical_order(features, targets, rows);
    best_split_ordered(features, targets, &ordered, min_node_size.max(1))
}

/// Sorts row indices by their full content (feature values, then target
/// values) so every later computation is independent of the caller's row
/// order. Duplicate rows compare equal; their relative order is irrelevant
/// because their contributions are identical.
fn canonical_order(features: &Matrix, targets: &Matrix, rows: &[usize]) -> Vec<usize> {
    let mut ordered = rows.to_vec();
    ordered.sort_unstable_by(|&a, &b| {
        for c in 0..features.cols() {
            match features.get(a, c).total_cmp(&features.get(b, c)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        for c in 0..targets.cols() {
            match targets.get(a, c).total_cmp(&targets.get(b, c)) {
                Ordering::Equal => continue,
                other => return other,
            }
        }
        Ordering::Equal
    });
    ordered
}

fn sse_from_sums(sum_sq: f64, sum: f64, n: usize) -> f64 {
    sum_sq - sum * sum / n as f64
}

/// Split search over rows already in canonical order.
fn best_split_ordered(
    features: &Matrix,
    targets: &Matrix,
    rows: &[usize],
    min_node_size: usize,
) -> Option<SplitRule> {
    let n = rows.len();
    if n < 2 * min_node_size {
        return None;
    }
    let q = targets.cols();

    let mut sum = vec![0.0; q];
    let mut sum_sq = vec![0.0; q];
    for &r in rows {
        for k in 0..q {
            let y = targets.get(r, k);
            sum[k] += y;
            sum_sq[k] += y * y;
        }
    }
    let parent_sse: Vec<f64> = (0..q).map(|k| sse_from_sums(sum_sq[k], sum[k], n)).collect();

    let mut best: Option<(usize, f64, f64)> = None; // (feature, threshold, gain)
    let mut order: Vec<usize> = Vec::with_capacity(n);
    let mut left_sum = vec![0.0; q];
    let mut left_sq = vec![0.0; q];

    for feat in 0..features.cols() {
        order.clear();
        order.extend_from_slice(rows);
        // Stable sort: rows with equal feature values keep canonical order.
        order.sort_by(|&a, &b| features.get(a, feat).total_cmp(&features.get(b, feat)));

        left_sum.iter_mut().for_each(|v| *v = 0.0);
        left_sq.iter_mut().for_each(|v| *v = 0.0);
        for i in 0..n - 1 {
            let r = order[i];
            for k in 0..q {
                let y = targets.get(r, k);
                left_sum[k] += y;
                left_sq[k] += y * y;
            }
            let v = features.get(r, feat);
            let v_next = features.get(order[i + 1], feat);
            if v == v_next {
                continue;
            }
            let n_left = i + 1;
            let n_right = n - n_left;
            if n_left < min_node_size || n_right < min_node_size {
                continue;
            }
            let mut threshold = (v + v_next) / 2.0;
            if threshold >= v_next {
                // Midpoint rounded up to the right value; fall back to the
                // left value so `x <= threshold` reproduces this partition.
                threshold = v;
            }
            let mut gain = 0.0;
            for k in 0..q {
                let sse_l = sse_from_sums(left_sq[k], left_sum[k], n_left);
                let sse_r = sse_from_sums(sum_sq[k] - left_sq[k], sum[k] - left_sum[k], n_right);
                gain += parent_sse[k] - sse_l - sse_r;
            }
            // Features and thresholds are scanned in ascending order, so
            // keeping the incumbent on ties resolves to the lowest feature
            // index, then the lowest threshold.
            if best.is_none_or(|(_, _, g)| gain > g + tie_epsilon(g)) {
                best = Some((feat, threshold, gain));
            }
        }
    }

    let (feature, threshold, total) = best?;
    if total <= GAIN_FLOOR {
        return None;
    }

    // Recompute the per-response decomposition for the winning candidate.
    let mut left_sum = vec![0.0; q];
    let mut left_sq = vec![0.0; q];
    let mut n_left = 0;
    for &r in rows {
        if features.get(r, feature) <= threshold {
            n_left += 1;
            for k in 0..q {
                let y = targets.get(r, k);
                left_sum[k] += y;
                left_sq[k] += y * y;
            }
        }
    }
    let n_right = n - n_left;
    let per_response_gain: Vec<f64> = (0..q)
        .map(|k| {
            let sse_l = sse_from_sums(left_sq[k], left_sum[k], n_left);
            let sse_r = sse_from_sums(sum_sq[k] - left_sq[k], sum[k] - left_sum[k], n_right);
            parent_sse[k] - sse_l - sse_r
        })
        .collect();
    let total_gain = per_response_gain.iter().sum::<f64>().max(0.0);

    Some(SplitRule {
        feature,
        threshold,
        total_gain,
        per_response_gain,
    })
}

fn leaf_mean(targets: &Matrix, rows: &[usize]) -> Vec<f64> {
    let q = targets.cols();
    let mut mean = vec![0.0; q];
    for &r in rows {
        for k in 0..q {
            mean[k] += targets.get(r, k);
        }
    }
    for m in &mut mean {
        *m /= rows.len() as f64;
    }
    mean
}

/// Depth-first recursive partitioning. Returns the maximum leaf depth of the
/// subtree rooted at the node it creates.
fn build(
    features: &Matrix,
    targets: &Matrix,
    rows: Vec<usize>,
    depth: usize,
    max_depth: usize,
    min_node_size: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let split = if depth < max_depth {
        best_split_ordered(features, targets, &rows, min_node_size)
    } else {
        None
    };

    match split {
        None => {
            nodes.push(Node::Leaf {
                value: leaf_mean(targets, &rows),
            });
            depth
        }
        Some(rule) => {
            let mut left_rows = Vec::new();
            let mut right_rows = Vec::new();
            for &r in &rows {
                if features.get(r, rule.feature) <= rule.threshold {
                    left_rows.push(r);
                } else {
                    right_rows.push(r);
                }
            }
            let idx = nodes.len();
            nodes.push(Node::Leaf { value: Vec::new() }); // placeholder
            let left = nodes.len();
            let dl = build(features, targets, left_rows, depth + 1, max_depth, min_node_size, nodes);
            let right = nodes.len();
            let dr = build(features, targets, right_rows, depth + 1, max_depth, min_node_size, nodes);
            nodes[idx] = Node::Internal { rule, left, right };
            dl.max(dr)
        }
    }
}

//! Multi-output gradient tree boosting.
//!
//! This crate fits one shared sequence of multivariate regression trees to
//! several correlated response variables at once. Every tree has vector-valued
//! leaves and is grown by minimising the summed squared error across all
//! responses, so responses with weak signal borrow split structure from
//! correlated strong-signal responses. On top of the fitted ensemble the crate
//! computes per-response relative influence, a global importance ranking,
//! per-response-pair attribution of residual-covariance reduction, Manhattan
//! distance matrices over predictors and response pairs, and complete-linkage
//! hierarchical clusterings of both.
//!
//! The crate is `no_std`-compatible (it only needs `alloc`); disable the
//! default `std` feature and enable `libm` to build without the standard
//! library. File formats, CSV ingestion and the command-line interface live in
//! the companion `mvgb-cli` crate.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

mod error;
mod float;

pub mod boosting;
pub mod cluster;
pub mod dataset;
pub mod evaluation;
pub mod influence;
pub mod matrix;
pub mod synthetic;
pub mod tree;

pub use boosting::{fit, BoostedModel, HyperParams, TrainingTrace};
pub use cluster::{hierarchical_cluster, manhattan_distances, Dendrogram, DistanceMatrix, Linkage, Merge};
pub use dataset::{standardize_responses, Dataset, StandardizationParams};
pub use error::{Error, Result};
pub use evaluation::{
    compare_models, evaluate, scenario_compare, ComparisonReport, EvalReport, Intervention,
    ScenarioDelta,
};
pub use influence::{
    covariance_explained, global_importance, relative_influence, InfluenceMatrix,
    PairInfluenceTensor,
};
pub use matrix::Matrix;
pub use synthetic::{generate_synthetic, SyntheticSpec};
pub use tree::{find_best_split, Node, SplitRule, Tree};

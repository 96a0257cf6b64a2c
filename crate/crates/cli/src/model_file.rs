//! Model persistence: a versioned JSON layout with trees stored as flat node
//! arrays. Floats are written with 17 significant digits so a loaded model
//! predicts bit-for-bit like the one that was saved.

use std::io::{self, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use mvgb::{BoostedModel, Node, SplitRule, StandardizationParams, Tree};

use crate::schema::Schema;
use crate::util::write_atomic;
use crate::{Error, Result};

pub const FORMAT_VERSION: u64 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u64,
    schema: Schema,
    standardization: StandardizationDto,
    init: Vec<f64>,
    shrinkage: f64,
    best_iteration: usize,
    feature_names: Vec<String>,
    feature_origin: Vec<usize>,
    origin_names: Vec<String>,
    response_names: Vec<String>,
    trees: Vec<TreeDto>,
}

#[derive(Serialize, Deserialize)]
struct StandardizationDto {
    response_means: Vec<f64>,
    response_sds: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct TreeDto {
    nodes: Vec<NodeDto>,
}

/// Internal nodes carry feature/threshold/children/gains; leaves carry the
/// value vector. The unused side is null.
#[derive(Serialize, Deserialize)]
struct NodeDto {
    feature: Option<usize>,
    threshold: Option<f64>,
    left: Option<usize>,
    right: Option<usize>,
    leaf_value: Option<Vec<f64>>,
    per_response_gain: Option<Vec<f64>>,
}

/// JSON formatter that prints every float with 17 significant digits
/// (`{:.16e}`), enough to reproduce any f64 exactly on reload.
struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn node_to_dto(node: &Node) -> NodeDto {
    match node {
        Node::Leaf { value } => NodeDto {
            feature: None,
            threshold: None,
            left: None,
            right: None,
            leaf_value: Some(value.clone()),
            per_response_gain: None,
        },
        Node::Internal { rule, left, right } => NodeDto {
            feature: Some(rule.feature),
            threshold: Some(rule.threshold),
            left: Some(*left),
            right: Some(*right),
            leaf_value: None,
            per_response_gain: Some(rule.per_response_gain.clone()),
        },
    }
}

fn dto_to_node(dto: &NodeDto) -> std::result::Result<Node, String> {
    match (&dto.feature, &dto.leaf_value) {
        (Some(feature), None) => {
            let threshold = dto.threshold.ok_or("internal node without threshold")?;
            let left = dto.left.ok_or("internal node without left child")?;
            let right = dto.right.ok_or("internal node without right child")?;
            let per_response_gain = dto
                .per_response_gain
                .clone()
                .ok_or("internal node without per_response_gain")?;
            let total_gain = per_response_gain.iter().sum::<f64>().max(0.0);
            Ok(Node::Internal {
                rule: SplitRule {
                    feature: *feature,
                    threshold,
                    total_gain,
                    per_response_gain,
                },
                left,
                right,
            })
        }
        (None, Some(value)) => Ok(Node::Leaf {
            value: value.clone(),
        }),
        _ => Err("node must be either internal (feature set) or leaf (leaf_value set)".into()),
    }
}

/// Saves a fitted model and the schema it was trained against.
pub fn save_model(path: &Path, model: &BoostedModel, schema: &Schema) -> Result<()> {
    let file = ModelFile {
        format_version: FORMAT_VERSION,
        schema: schema.clone(),
        standardization: StandardizationDto {
            response_means: model.standardization.response_means.clone(),
            response_sds: model.standardization.response_sds.clone(),
        },
        init: model.init.clone(),
        shrinkage: model.shrinkage,
        best_iteration: model.best_iteration,
        feature_names: model.feature_names.clone(),
        feature_origin: model.feature_origin.clone(),
        origin_names: model.origin_names.clone(),
        response_names: model.response_names.clone(),
        trees: model
            .trees
            .iter()
            .map(|t| TreeDto {
                nodes: t.nodes().iter().map(node_to_dto).collect(),
            })
            .collect(),
    };

    let mut bytes = Vec::new();
    let mut serializer =
        serde_json::Serializer::with_formatter(&mut bytes, SigDigitFormatter);
    file.serialize(&mut serializer)
        .map_err(|e| Error::CorruptModelFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
    bytes.push(b'\n');
    write_atomic(path, &bytes)
}

fn corrupt(path: &Path, reason: impl ToString) -> Error {
    Error::CorruptModelFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Loads a model file, checking the format version before anything else and
/// validating the structure before handing back a usable model.
pub fn load_model(path: &Path) -> Result<(BoostedModel, Schema)> {
    let text = crate::util::read_to_string(path)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| corrupt(path, e))?;
    let version = value
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| corrupt(path, "missing format_version"))?;
    if version != FORMAT_VERSION {
        return Err(Error::VersionMismatch { found: version });
    }
    let file: ModelFile = serde_json::from_value(value).map_err(|e| corrupt(path, e))?;

    let q = file.response_names.len();
    if file.init.len() != q
        || file.standardization.response_means.len() != q
        || file.standardization.response_sds.len() != q
    {
        return Err(corrupt(path, "inconsistent response dimensions"));
    }
    let p = file.feature_names.len();
    if file.feature_origin.len() != p {
        return Err(corrupt(path, "feature_origin length mismatch"));
    }
    if file
        .feature_origin
        .iter()
        .any(|&o| o >= file.origin_names.len())
    {
        return Err(corrupt(path, "feature_origin index out of range"));
    }
    if file.best_iteration > file.trees.len() {
        return Err(corrupt(path, "best_iteration exceeds tree count"));
    }

    let mut trees = Vec::with_capacity(file.trees.len());
    for (i, tree_dto) in file.trees.iter().enumerate() {
        let nodes: std::result::Result<Vec<Node>, String> =
            tree_dto.nodes.iter().map(dto_to_node).collect();
        let nodes = nodes.map_err(|e| corrupt(path, format!("tree {i}: {e}")))?;
        for node in &nodes {
            let arity = match node {
                Node::Leaf { value } => value.len(),
                Node::Internal { rule, .. } => rule.per_response_gain.len(),
            };
            if arity != q {
                return Err(corrupt(path, format!("tree {i}: node arity {arity} != {q}")));
            }
        }
        let tree = Tree::from_nodes(nodes).map_err(|e| corrupt(path, format!("tree {i}: {e}")))?;
        trees.push(tree);
    }

    let model = BoostedModel {
        init: file.init,
        trees,
        shrinkage: file.shrinkage,
        best_iteration: file.best_iteration,
        standardization: StandardizationParams {
            response_means: file.standardization.response_means,
            response_sds: file.standardization.response_sds,
        },
        feature_names: file.feature_names,
        feature_origin: file.feature_origin,
        origin_names: file.origin_names,
        response_names: file.response_names,
    };
    file.schema.validate()?;
    Ok((model, file.schema))
}

#[cfg(test)]
mod tests {
    use super::*;
    use mvgb::{fit, generate_synthetic, HyperParams, SyntheticSpec};

    fn fitted() -> (BoostedModel, Schema) {
        let d = generate_synthetic(&SyntheticSpec {
            n: 120,
            seed: 9,
            noise_corr: 0.6,
        })
        .unwrap();
        let (model, _) = fit(
            &d,
            &HyperParams {
                n_trees: 40,
                ..HyperParams::default()
            },
        )
        .unwrap();
        let schema =
            Schema::numeric(&["x1", "x2", "x3", "x4", "x5"], &["y1", "y2"]).unwrap();
        (model, schema)
    }

    #[test]
    fn round_trip_preserves_model_and_predictions() {
        let (model, schema) = fitted();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model, &schema).unwrap();
        let (loaded, loaded_schema) = load_model(&path).unwrap();
        assert_eq!(loaded_schema, schema);
        assert_eq!(loaded, model);

        let d = generate_synthetic(&SyntheticSpec {
            n: 60,
            seed: 1,
            noise_corr: 0.2,
        })
        .unwrap();
        let a = model.predict(d.features()).unwrap();
        let b = loaded.predict(d.features()).unwrap();
        for r in 0..d.n_rows() {
            for k in 0..2 {
                assert_eq!(a.get(r, k).to_bits(), b.get(r, k).to_bits());
            }
        }
    }

    #[test]
    fn truncated_file_is_corrupt() {
        let (model, schema) = fitted();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model, &schema).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::CorruptModelFile { .. })
        ));
    }

    #[test]
    fn unknown_version_rejected() {
        let (model, schema) = fitted();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model, &schema).unwrap();
        let text = std::fs::read_to_string(&path)
            .unwrap()
            .replace("\"format_version\":1", "\"format_version\":99");
        std::fs::write(&path, text).unwrap();
        assert!(matches!(
            load_model(&path),
            Err(Error::VersionMismatch { found: 99 })
        ));
    }

    #[test]
    fn floats_are_written_with_17_significant_digits() {
        let (model, schema) = fitted();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("model.json");
        save_model(&path, &model, &schema).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(
            text.contains("e0") || text.contains("e-"),
            "expected scientific notation in {path:?}"
        );
        // Spot-check: the shrinkage 0.05 appears with 16 fractional digits.
        assert!(text.contains("5.0000000000000003e-2"), "shrinkage encoding");
    }
}

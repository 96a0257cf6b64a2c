//! Renderers for analysis artifacts: influence and importance CSVs,
//! pair-influence and distance matrices, dendrogram JSON/Newick, evaluation
//! and comparison reports, and scenario tables.

use std::fmt::Write as _;

use mvgb::{
    BoostedModel, ComparisonReport, Dendrogram, DistanceMatrix, EvalReport, InfluenceMatrix,
    Matrix, PairInfluenceTensor, ScenarioDelta,
};

use crate::util::fmt_f64;
use crate::{Error, Result};

fn csv_from_records(header: &[String], rows: &[Vec<String>], comment: &str) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(header)?;
    for row in rows {
        writer.write_record(row)?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let mut bytes = format!("{comment}\n").into_bytes();
    bytes.extend_from_slice(&body);
    Ok(bytes)
}

/// `feature,<response…>` rows of per-response influence percentages.
pub fn influence_csv(infl: &InfluenceMatrix, comment: &str) -> Result<Vec<u8>> {
    let mut header = vec!["feature".to_string()];
    header.extend(infl.response_names.iter().cloned());
    let rows: Vec<Vec<String>> = (0..infl.values.rows())
        .map(|f| {
            let mut row = vec![infl.feature_names[f].clone()];
            row.extend((0..infl.values.cols()).map(|k| fmt_f64(infl.values.get(f, k))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

/// Global importance ranking: `rank,feature,score`.
pub fn ranking_csv(ranking: &[(String, f64)], comment: &str) -> Result<Vec<u8>> {
    let header = vec![
        "rank".to_string(),
        "feature".to_string(),
        "score".to_string(),
    ];
    let rows: Vec<Vec<String>> = ranking
        .iter()
        .enumerate()
        .map(|(i, (name, score))| vec![(i + 1).to_string(), name.clone(), fmt_f64(*score)])
        .collect();
    csv_from_records(&header, &rows, comment)
}

/// `feature,<pair…>` rows of signed covariance-reduction attribution.
pub fn tensor_csv(tensor: &PairInfluenceTensor, comment: &str) -> Result<Vec<u8>> {
    let mut header = vec!["feature".to_string()];
    header.extend(tensor.pair_labels());
    let rows: Vec<Vec<String>> = (0..tensor.values.rows())
        .map(|f| {
            let mut row = vec![tensor.feature_names[f].clone()];
            row.extend((0..tensor.values.cols()).map(|c| fmt_f64(tensor.values.get(f, c))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

/// Square distance matrix with a leading label column.
pub fn distance_csv(d: &DistanceMatrix, comment: &str) -> Result<Vec<u8>> {
    let mut header = vec!["label".to_string()];
    header.extend(d.labels().iter().cloned());
    let rows: Vec<Vec<String>> = (0..d.len())
        .map(|a| {
            let mut row = vec![d.labels()[a].clone()];
            row.extend((0..d.len()).map(|b| fmt_f64(d.get(a, b))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

/// Dendrogram as `{"labels": […], "merges": [[a, b, height], …]}`.
pub fn dendrogram_json(dend: &Dendrogram) -> Result<Vec<u8>> {
    let merges: Vec<serde_json::Value> = dend
        .merges
        .iter()
        .map(|m| serde_json::json!([m.cluster_a, m.cluster_b, m.height]))
        .collect();
    let value = serde_json::json!({
        "labels": dend.labels,
        "merges": merges,
    });
    let mut text =
        serde_json::to_string_pretty(&value).map_err(|e| Error::Usage(e.to_string()))?;
    text.push('\n');
    Ok(text.into_bytes())
}

fn newick_label(label: &str) -> String {
    label
        .chars()
        .map(|c| match c {
            ' ' | '(' | ')' | '[' | ']' | ':' | ';' | ',' | '\'' => '_',
            other => other,
        })
        .collect()
}

/// Ultrametric Newick text: branch lengths are the height differences
/// between a cluster and its parent merge.
pub fn dendrogram_newick(dend: &Dendrogram) -> String {
    let k = dend.labels.len();

    // Height at which each cluster id was created (leaves at 0).
    fn render(dend: &Dendrogram, k: usize, id: usize) -> (String, f64) {
        if id < k {
            (newick_label(&dend.labels[id]), 0.0)
        } else {
            let merge = &dend.merges[id - k];
            let (left, left_h) = render(dend, k, merge.cluster_a);
            let (right, right_h) = render(dend, k, merge.cluster_b);
            let text = format!(
                "({}:{},{}:{})",
                left,
                fmt_f64(merge.height - left_h),
                right,
                fmt_f64(merge.height - right_h)
            );
            (text, merge.height)
        }
    }

    if dend.merges.is_empty() {
        // Single label; degenerate but printable.
        return format!("{};\n", newick_label(&dend.labels[0]));
    }
    let root = k + dend.merges.len() - 1;
    let (text, _) = render(dend, k, root);
    format!("{text};\n")
}

/// Wide observed-vs-predicted export (standardized scale), one line per test
/// row: `row,obs:<name>…,pred:<name>…`.
pub fn observed_predicted_csv(report: &EvalReport, names: &[String], comment: &str) -> Result<Vec<u8>> {
    let mut header = vec!["row".to_string()];
    header.extend(names.iter().map(|n| format!("observed:{n}")));
    header.extend(names.iter().map(|n| format!("predicted:{n}")));
    let q = names.len();
    let rows: Vec<Vec<String>> = (0..report.n_test)
        .map(|r| {
            let mut row = vec![report.test_rows[r].to_string()];
            row.extend((0..q).map(|k| fmt_f64(report.observed_std.get(r, k))));
            row.extend((0..q).map(|k| fmt_f64(report.predicted_std.get(r, k))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

pub fn eval_report_csv(report: &EvalReport, comment: &str) -> Result<Vec<u8>> {
    let header = vec![
        "response".to_string(),
        "mse".to_string(),
        "r2".to_string(),
        "n_train".to_string(),
        "n_test".to_string(),
    ];
    let rows: Vec<Vec<String>> = report
        .per_response
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                fmt_f64(r.mse),
                fmt_f64(r.r2),
                report.n_train.to_string(),
                report.n_test.to_string(),
            ]
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

pub fn eval_report_table(report: &EvalReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "out-of-sample evaluation (n_train={}, n_test={}, split_seed={})",
        report.n_train, report.n_test, report.split_seed
    );
    let _ = writeln!(out, "{:<20} {:>12} {:>12}", "response", "mse", "r2");
    for r in &report.per_response {
        let _ = writeln!(out, "{:<20} {:>12.4} {:>12.4}", r.name, r.mse, r.r2);
    }
    out
}

pub fn comparison_csv(report: &ComparisonReport, comment: &str) -> Result<Vec<u8>> {
    let header = vec![
        "response".to_string(),
        "mse_multi".to_string(),
        "mse_uni".to_string(),
        "r2_multi".to_string(),
        "r2_uni".to_string(),
    ];
    let rows: Vec<Vec<String>> = report
        .per_response
        .iter()
        .map(|r| {
            vec![
                r.name.clone(),
                fmt_f64(r.mse_multi),
                fmt_f64(r.mse_uni),
                fmt_f64(r.r2_multi),
                fmt_f64(r.r2_uni),
            ]
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

pub fn comparison_table(report: &ComparisonReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "joint vs univariate models (n_train={}, n_test={}, split_seed={})",
        report.n_train, report.n_test, report.split_seed
    );
    let _ = writeln!(
        out,
        "{:<20} {:>12} {:>12} {:>12} {:>12}",
        "response", "mse_multi", "mse_uni", "r2_multi", "r2_uni"
    );
    for r in &report.per_response {
        let _ = writeln!(
            out,
            "{:<20} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            r.name, r.mse_multi, r.mse_uni, r.r2_multi, r.r2_uni
        );
    }
    out
}

fn percent_cell(delta: &ScenarioDelta) -> String {
    delta
        .percent_change
        .map(|p| format!("{p:+.2}%"))
        .unwrap_or_else(|| "n/a".to_string())
}

pub fn scenario_table(labels: &[String], results: &[Vec<ScenarioDelta>]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<28} {:<16} {:>14} {:>14} {:>10}",
        "intervention", "response", "baseline_mean", "scenario_mean", "change"
    );
    for (label, deltas) in labels.iter().zip(results) {
        for delta in deltas {
            let _ = writeln!(
                out,
                "{:<28} {:<16} {:>14.4} {:>14.4} {:>10}",
                label,
                delta.response_name,
                delta.baseline_mean,
                delta.scenario_mean,
                percent_cell(delta)
            );
        }
    }
    out
}

pub fn scenario_csv(
    labels: &[String],
    results: &[Vec<ScenarioDelta>],
    comment: &str,
) -> Result<Vec<u8>> {
    let header = vec![
        "intervention".to_string(),
        "response".to_string(),
        "baseline_mean".to_string(),
        "scenario_mean".to_string(),
        "percent_change".to_string(),
    ];
    let mut rows = Vec::new();
    for (label, deltas) in labels.iter().zip(results) {
        for delta in deltas {
            rows.push(vec![
                label.clone(),
                delta.response_name.clone(),
                fmt_f64(delta.baseline_mean),
                fmt_f64(delta.scenario_mean),
                delta.percent_change.map(fmt_f64).unwrap_or_default(),
            ]);
        }
    }
    csv_from_records(&header, &rows, comment)
}

/// Per-row scenario export: baseline and scenario predictions for every
/// input row (original response scale).
pub fn scenario_rows_csv(
    model: &BoostedModel,
    baseline: &Matrix,
    scenario: &Matrix,
    comment: &str,
) -> Result<Vec<u8>> {
    let mut header = vec!["row".to_string()];
    for name in &model.response_names {
        header.push(format!("baseline:{name}"));
    }
    for name in &model.response_names {
        header.push(format!("scenario:{name}"));
    }
    let q = model.n_responses();
    let rows: Vec<Vec<String>> = (0..baseline.rows())
        .map(|r| {
            let mut row = vec![r.to_string()];
            row.extend((0..q).map(|k| fmt_f64(baseline.get(r, k))));
            row.extend((0..q).map(|k| fmt_f64(scenario.get(r, k))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

/// Predictions CSV (original response scale) with a leading input-row column.
pub fn predictions_csv(
    predictions: &Matrix,
    response_names: &[String],
    comment: &str,
) -> Result<Vec<u8>> {
    let mut header = vec!["row".to_string()];
    header.extend(response_names.iter().cloned());
    let rows: Vec<Vec<String>> = (0..predictions.rows())
        .map(|r| {
            let mut row = vec![r.to_string()];
            row.extend((0..predictions.cols()).map(|k| fmt_f64(predictions.get(r, k))));
            row
        })
        .collect();
    csv_from_records(&header, &rows, comment)
}

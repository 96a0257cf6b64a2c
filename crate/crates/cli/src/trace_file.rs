//! Training-trace CSV: per-iteration error curves plus the residual
//! covariance entries the covariance-explained attribution needs. Row 0 is
//! the mean-only baseline (covariance of the standardized responses).

use std::path::Path;

use mvgb::influence::response_pairs;
use mvgb::{Matrix, TrainingTrace};

use crate::util::{fmt_f64, write_atomic};
use crate::{Error, Result};

/// Serialises a trace to CSV bytes. Covariance columns are the upper
/// triangle in pair order, labelled `cov:name_i~name_j`.
pub fn trace_csv_bytes(
    trace: &TrainingTrace,
    response_names: &[String],
    comment: &str,
) -> Result<Vec<u8>> {
    let q = response_names.len();
    let pairs = response_pairs(q);
    let mut writer = csv::Writer::from_writer(Vec::new());

    let mut header = vec![
        "iteration".to_string(),
        "train_mse".to_string(),
        "holdout_mse".to_string(),
    ];
    for &(i, j) in &pairs {
        header.push(format!("cov:{}~{}", response_names[i], response_names[j]));
    }
    writer.write_record(&header)?;

    let holdout_cell = |m: Option<f64>| m.map(fmt_f64).unwrap_or_default();
    let mut row = vec![
        "0".to_string(),
        fmt_f64(trace.baseline_train_mse),
        holdout_cell(trace.baseline_holdout_mse),
    ];
    for &(i, j) in &pairs {
        row.push(fmt_f64(trace.residual_cov[0].get(i, j)));
    }
    writer.write_record(&row)?;

    for m in 0..trace.n_iterations() {
        let mut row = vec![
            (m + 1).to_string(),
            fmt_f64(trace.train_mse[m]),
            holdout_cell(trace.holdout_mse.as_ref().map(|c| c[m])),
        ];
        for &(i, j) in &pairs {
            row.push(fmt_f64(trace.residual_cov[m + 1].get(i, j)));
        }
        writer.write_record(&row)?;
    }

    let body = writer
        .into_inner()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let mut bytes = format!("{comment}\n").into_bytes();
    bytes.extend_from_slice(&body);
    Ok(bytes)
}

pub fn write_trace_csv(
    path: &Path,
    trace: &TrainingTrace,
    response_names: &[String],
    comment: &str,
) -> Result<()> {
    write_atomic(path, &trace_csv_bytes(trace, response_names, comment)?)
}

fn corrupt(path: &Path, reason: impl ToString) -> Error {
    Error::CorruptTraceFile {
        path: path.to_path_buf(),
        reason: reason.to_string(),
    }
}

/// Reads a trace CSV back. The reloaded trace carries the curves and
/// covariance records; the training/holdout row index lists are not part of
/// the file format and come back empty.
pub fn read_trace_csv(path: &Path) -> Result<TrainingTrace> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);

    let headers: Vec<String> = reader.headers()?.iter().map(|h| h.to_string()).collect();
    if headers.len() < 4
        || headers[0] != "iteration"
        || headers[1] != "train_mse"
        || headers[2] != "holdout_mse"
    {
        return Err(corrupt(path, "unexpected header layout"));
    }
    let n_cov = headers.len() - 3;
    // n_cov = q(q+1)/2
    let q = (0..=n_cov)
        .find(|&q| q * (q + 1) / 2 == n_cov)
        .ok_or_else(|| corrupt(path, "covariance column count is not triangular"))?;
    let pairs = response_pairs(q);

    let mut train_mse = Vec::new();
    let mut holdout_raw: Vec<Option<f64>> = Vec::new();
    let mut residual_cov = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let iter: usize = record
            .get(0)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| corrupt(path, "bad iteration cell"))?;
        if iter != idx {
            return Err(corrupt(path, format!("iteration {iter} out of order")));
        }
        let train: f64 = record
            .get(1)
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| corrupt(path, "bad train_mse cell"))?;
        let holdout_cell = record.get(2).unwrap_or("");
        let holdout = if holdout_cell.is_empty() {
            None
        } else {
            Some(
                holdout_cell
                    .parse::<f64>()
                    .map_err(|e| corrupt(path, e))?,
            )
        };
        let mut cov = Matrix::zeros(q, q);
        for (c, &(i, j)) in pairs.iter().enumerate() {
            let v: f64 = record
                .get(3 + c)
                .and_then(|cell| cell.parse().ok())
                .ok_or_else(|| corrupt(path, "bad covariance cell"))?;
            cov.set(i, j, v);
            cov.set(j, i, v);
        }
        residual_cov.push(cov);
        train_mse.push(train);
        holdout_raw.push(holdout);
    }
    if residual_cov.is_empty() {
        return Err(corrupt(path, "no rows"));
    }
    let baseline_train_mse = train_mse.remove(0);
    let baseline_holdout_mse = holdout_raw.remove(0);
    let use_holdout = baseline_holdout_mse.is_some();
    let mut holdout_mse = use_holdout.then(Vec::new);
    for (m, cell) in holdout_raw.into_iter().enumerate() {
        match (&mut holdout_mse, cell) {
            (Some(curve), Some(v)) => curve.push(v),
            (None, None) => {}
            _ => return Err(corrupt(path, format!("inconsistent holdout column at row {}", m + 1))),
        }
    }

    Ok(TrainingTrace {
        train_rows: Vec::new(),
        holdout_rows: Vec::new(),
        baseline_train_mse,
        baseline_holdout_mse,
        train_mse,
        holdout_mse,
        residual_cov,
    })
}

//! CSV ingestion: schema-driven parsing, one-hot encoding of categorical
//! columns, optional mean/mode imputation, and dataset export.

use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::path::Path;

use mvgb::{BoostedModel, Dataset, Matrix};

use crate::schema::{ColumnKind, Schema};
use crate::util::{fmt_f64, write_atomic};
use crate::{Error, Result};

fn read_table(path: &Path) -> Result<(Vec<String>, Vec<csv::StringRecord>)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let headers: Vec<String> = reader
        .headers()?
        .iter()
        .map(|h| h.to_string())
        .collect();
    let mut records = Vec::new();
    for record in reader.records() {
        records.push(record?);
    }
    Ok((headers, records))
}

fn header_position(headers: &[String], name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h == name)
        .ok_or_else(|| Error::MissingColumn {
            name: name.to_string(),
        })
}

/// Parses a numeric column. Empty cells are missing; with `impute` they are
/// replaced by the column mean, otherwise they are an error. Row numbers in
/// errors are 1-based data rows.
fn parse_numeric(
    name: &str,
    pos: usize,
    records: &[csv::StringRecord],
    impute: bool,
) -> Result<Vec<f64>> {
    let mut values: Vec<Option<f64>> = Vec::with_capacity(records.len());
    for (row, record) in records.iter().enumerate() {
        let cell = record.get(pos).unwrap_or("");
        if cell.is_empty() {
            if !impute {
                return Err(Error::NonNumericCell {
                    column: name.to_string(),
                    row: row + 1,
                    value: String::new(),
                });
            }
            values.push(None);
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => values.push(Some(v)),
            _ => {
                return Err(Error::NonNumericCell {
                    column: name.to_string(),
                    row: row + 1,
                    value: cell.to_string(),
                })
            }
        }
    }
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    if present.is_empty() {
        return Err(Error::NonNumericCell {
            column: name.to_string(),
            row: 1,
            value: String::new(),
        });
    }
    let mean = present.iter().sum::<f64>() / present.len() as f64;
    Ok(values.into_iter().map(|v| v.unwrap_or(mean)).collect())
}

/// Parses a categorical column into its observed cell values, imputing the
/// mode (ties to the lexicographically smallest level) when asked.
fn parse_categorical(
    name: &str,
    pos: usize,
    records: &[csv::StringRecord],
    impute: bool,
) -> Result<Vec<String>> {
    let mut values: Vec<Option<String>> = Vec::with_capacity(records.len());
    for (row, record) in records.iter().enumerate() {
        let cell = record.get(pos).unwrap_or("");
        if cell.is_empty() {
            if !impute {
                return Err(Error::NonNumericCell {
                    column: name.to_string(),
                    row: row + 1,
                    value: String::new(),
                });
            }
            values.push(None);
        } else {
            values.push(Some(cell.to_string()));
        }
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for v in values.iter().flatten() {
        *counts.entry(v.as_str()).or_insert(0) += 1;
    }
    if counts.is_empty() {
        return Err(Error::NonNumericCell {
            column: name.to_string(),
            row: 1,
            value: String::new(),
        });
    }
    // BTreeMap iterates levels in ascending order, so keeping the strictly
    // larger count makes ties resolve to the smallest level.
    let mode = counts
        .iter()
        .fold(("", 0usize), |acc, (&level, &count)| {
            if count > acc.1 {
                (level, count)
            } else {
                acc
            }
        })
        .0
        .to_string();
    Ok(values
        .into_iter()
        .map(|v| v.unwrap_or_else(|| mode.clone()))
        .collect())
}

/// Loads a CSV file against a declared schema.
///
/// Categorical columns become one indicator column per observed level
/// (levels sorted lexicographically, names `column=level`); numeric columns
/// pass through. Lines starting with `#` are skipped.
pub fn load_csv(path: &Path, schema: &Schema, impute: bool) -> Result<Dataset> {
    schema.validate()?;
    let (headers, records) = read_table(path)?;
    if records.len() < 2 {
        return Err(Error::EmptyDataset);
    }
    let n = records.len();

    let mut feature_columns: Vec<Vec<f64>> = Vec::new();
    let mut feature_names: Vec<String> = Vec::new();
    let mut feature_origin: Vec<usize> = Vec::new();
    let mut origin_names: Vec<String> = Vec::new();
    let mut response_columns: Vec<Vec<f64>> = Vec::new();
    let mut response_names: Vec<String> = Vec::new();

    for column in &schema.columns {
        match column.kind {
            ColumnKind::Ignore => {}
            ColumnKind::NumericFeature => {
                let pos = header_position(&headers, &column.name)?;
                let values = parse_numeric(&column.name, pos, &records, impute)?;
                let origin = origin_names.len();
                origin_names.push(column.name.clone());
                feature_names.push(column.name.clone());
                feature_origin.push(origin);
                feature_columns.push(values);
            }
            ColumnKind::CategoricalFeature => {
                let pos = header_position(&headers, &column.name)?;
                let values = parse_categorical(&column.name, pos, &records, impute)?;
                let levels: BTreeSet<&str> = values.iter().map(String::as_str).collect();
                let origin = origin_names.len();
                origin_names.push(column.name.clone());
                for level in levels {
                    feature_names.push(format!("{}={level}", column.name));
                    feature_origin.push(origin);
                    feature_columns.push(
                        values
                            .iter()
                            .map(|v| if v == level { 1.0 } else { 0.0 })
                            .collect(),
                    );
                }
            }
            ColumnKind::Response => {
                let pos = header_position(&headers, &column.name)?;
                let values = parse_numeric(&column.name, pos, &records, impute)?;
                let (min, max) = values
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                        (lo.min(v), hi.max(v))
                    });
                if min == max {
                    return Err(Error::ConstantResponse {
                        name: column.name.clone(),
                    });
                }
                response_names.push(column.name.clone());
                response_columns.push(values);
            }
        }
    }

    let mut features = Matrix::zeros(n, feature_columns.len());
    for (c, col) in feature_columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            features.set(r, c, v);
        }
    }
    let mut responses = Matrix::zeros(n, response_columns.len());
    for (c, col) in response_columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            responses.set(r, c, v);
        }
    }

    Dataset::new(
        features,
        responses,
        feature_names,
        feature_origin,
        origin_names,
        response_names,
    )
    .map_err(Into::into)
}

/// Loads only the feature matrix of a CSV, encoded into a fitted model's
/// feature space (prediction path). Categorical cells are matched against
/// the model's indicator columns; a level the model never saw encodes as
/// all-zeros for its group. Response columns need not be present.
pub fn load_features_for_model(
    path: &Path,
    schema: &Schema,
    model: &BoostedModel,
) -> Result<Matrix> {
    let (headers, records) = read_table(path)?;
    if records.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = records.len();

    // Parse each source column once.
    let mut numeric: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    let mut categorical: BTreeMap<usize, Vec<String>> = BTreeMap::new();
    for (origin, origin_name) in model.origin_names.iter().enumerate() {
        let kind = schema
            .columns
            .iter()
            .find(|c| &c.name == origin_name)
            .map(|c| c.kind)
            .ok_or_else(|| Error::InvalidSchema(format!(
                "model feature '{origin_name}' is not declared in the schema"
            )))?;
        let pos = header_position(&headers, origin_name)?;
        match kind {
            ColumnKind::NumericFeature => {
                numeric.insert(origin, parse_numeric(origin_name, pos, &records, false)?);
            }
            ColumnKind::CategoricalFeature => {
                categorical.insert(
                    origin,
                    parse_categorical(origin_name, pos, &records, false)?,
                );
            }
            _ => {
                return Err(Error::InvalidSchema(format!(
                    "model feature '{origin_name}' is not a feature column in the schema"
                )))
            }
        }
    }

    let mut features = Matrix::zeros(n, model.n_features());
    for (k, encoded_name) in model.feature_names.iter().enumerate() {
        let origin = model.feature_origin[k];
        if let Some(values) = numeric.get(&origin) {
            for (r, &v) in values.iter().enumerate() {
                features.set(r, k, v);
            }
        } else if let Some(values) = categorical.get(&origin) {
            let prefix = format!("{}=", model.origin_names[origin]);
            let level = encoded_name.strip_prefix(&prefix).ok_or_else(|| {
                Error::InvalidSchema(format!(
                    "encoded feature '{encoded_name}' does not match source column '{}'",
                    model.origin_names[origin]
                ))
            })?;
            for (r, v) in values.iter().enumerate() {
                features.set(r, k, if v == level { 1.0 } else { 0.0 });
            }
        }
    }
    Ok(features)
}

/// Serialises a dataset back to CSV (feature columns, then response
/// columns), with a provenance comment line on top.
pub fn dataset_csv_bytes(d: &Dataset, comment: &str) -> Result<Vec<u8>> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    let header: Vec<&str> = d
        .feature_names()
        .iter()
        .chain(d.response_names())
        .map(String::as_str)
        .collect();
    writer.write_record(&header)?;
    for r in 0..d.n_rows() {
        let mut record: Vec<String> = Vec::with_capacity(header.len());
        for c in 0..d.n_features() {
            record.push(fmt_f64(d.features().get(r, c)));
        }
        for c in 0..d.n_responses() {
            record.push(fmt_f64(d.responses().get(r, c)));
        }
        writer.write_record(&record)?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Usage(e.to_string()))?;
    let mut bytes = format!("{comment}\n").into_bytes();
    bytes.extend_from_slice(&body);
    Ok(bytes)
}

/// Writes a dataset CSV atomically.
pub fn write_dataset_csv(path: &Path, d: &Dataset, comment: &str) -> Result<()> {
    write_atomic(path, &dataset_csv_bytes(d, comment)?)
}

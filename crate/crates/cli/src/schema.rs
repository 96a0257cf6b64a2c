//! Dataset schema: which CSV columns are predictors (numeric or
//! categorical), which are responses, and which to skip.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::util::{read_to_string, write_atomic};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    NumericFeature,
    CategoricalFeature,
    Response,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemaColumn {
    pub name: String,
    pub kind: ColumnKind,
}

/// Declared layout of a dataset CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Schema {
    pub columns: Vec<SchemaColumn>,
}

impl Schema {
    pub fn new(columns: Vec<SchemaColumn>) -> Result<Self> {
        let schema = Schema { columns };
        schema.validate()?;
        Ok(schema)
    }

    /// All-numeric convenience constructor.
    pub fn numeric(features: &[&str], responses: &[&str]) -> Result<Self> {
        let mut columns = Vec::new();
        for name in features {
            columns.push(SchemaColumn {
                name: (*name).to_string(),
                kind: ColumnKind::NumericFeature,
            });
        }
        for name in responses {
            columns.push(SchemaColumn {
                name: (*name).to_string(),
                kind: ColumnKind::Response,
            });
        }
        Schema::new(columns)
    }

    pub fn validate(&self) -> Result<()> {
        let mut names: Vec<&str> = self.columns.iter().map(|c| c.name.as_str()).collect();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSchema("duplicate column names".into()));
        }
        if !self.columns.iter().any(|c| {
            matches!(
                c.kind,
                ColumnKind::NumericFeature | ColumnKind::CategoricalFeature
            )
        }) {
            return Err(Error::InvalidSchema(
                "schema needs at least one feature column".into(),
            ));
        }
        if !self.columns.iter().any(|c| c.kind == ColumnKind::Response) {
            return Err(Error::InvalidSchema(
                "schema needs at least one response column".into(),
            ));
        }
        Ok(())
    }

    /// Feature columns (numeric or categorical) in schema order.
    pub fn feature_columns(&self) -> impl Iterator<Item = &SchemaColumn> {
        self.columns.iter().filter(|c| {
            matches!(
                c.kind,
                ColumnKind::NumericFeature | ColumnKind::CategoricalFeature
            )
        })
    }

    pub fn response_columns(&self) -> impl Iterator<Item = &SchemaColumn> {
        self.columns.iter().filter(|c| c.kind == ColumnKind::Response)
    }

    pub fn load(path: &Path) -> Result<Schema> {
        let text = read_to_string(path)?;
        let schema: Schema = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidSchema(format!("{}: {e}", path.display())))?;
        schema.validate()?;
        Ok(schema)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::InvalidSchema(e.to_string()))?;
        text.push('\n');
        write_atomic(path, text.as_bytes())
    }
}

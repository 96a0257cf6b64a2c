//! File formats, CSV ingestion and the command-line front end for the `mvgb`
//! boosting toolkit. Everything that touches the filesystem lives here; the
//! algorithms are in the `mvgb` core crate.

pub mod cli;
pub mod config;
pub mod csv_data;
pub mod error;
pub mod model_file;
pub mod reports;
pub mod schema;
pub mod trace_file;
pub mod util;

pub use error::{Error, Result};
pub use schema::{ColumnKind, Schema, SchemaColumn};

/// Tool version recorded in output-file provenance comments.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

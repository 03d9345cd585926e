//! Case tables in, models out.
//!
//! Cases are read from CSV against a declared signature, turned into a
//! literal pool by per-attribute discretization rules, and learned rule
//! sets, interview sessions and hierarchical models are persisted as
//! versioned JSON with sorted keys.

mod cases;
mod discretize;
mod model;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::monotone::MonotoneError;
use crate::rule_core::RuleError;

pub use cases::{load_cases_csv, read_cases_csv, write_cases_csv, ID_COLUMN};
pub use discretize::{discretize, AttributeRule, BinaryView, DatasetSchema, DiscretizationSpec, Discretized};
pub use model::{
    from_json_str, from_json_value, load_model, save_model, to_json_string, to_json_value, SessionDoc,
    StoredModel, SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("empty case table")]
    EmptyFile,
    #[error("missing column `{0}`")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: {message}")]
    Csv {
        row: usize,
        column: String,
        message: String,
    },
    #[error("JSON error at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("schema_version {found} is not supported (expected {supported}); re-save the model with this version")]
    UnsupportedVersion { found: String, supported: u32 },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("invalid discretization spec: {0}")]
    Spec(String),
    #[error(transparent)]
    Rule(#[from] RuleError),
    #[error(transparent)]
    Monotone(#[from] MonotoneError),
}

impl IoError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub(crate) fn from_json(e: serde_json::Error) -> Self {
        IoError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }
}

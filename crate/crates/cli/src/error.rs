use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ridge_sdr::Error),

    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },

    #[error("row {row}: expected {expected} fields, found {found}")]
    RaggedRow { row: usize, expected: usize, found: usize },

    #[error("row {row}, column `{column}`: `{value}` is not a number")]
    NonNumeric { row: usize, column: String, value: String },

    #[error("header must name predictors x1..xm followed by y, got `{0}`")]
    BadHeader(String),

    #[error("missing `y` column")]
    MissingResponse,

    #[error("dataset has {0} rows, at least 2 are required")]
    TooFewRows(usize),

    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.code(),
            CliError::Io { .. } => "io",
            CliError::RaggedRow { .. } => "ragged_row",
            CliError::NonNumeric { .. } => "non_numeric_cell",
            CliError::BadHeader(_) => "bad_header",
            CliError::MissingResponse => "missing_response_column",
            CliError::TooFewRows(_) => "too_few_rows",
            CliError::Usage(_) => "usage",
        }
    }

    pub fn io(path: impl Into<PathBuf>, err: impl ToString) -> Self {
        CliError::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Machine-readable rendering written to stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            code: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                code: self.code(),
                message: self.to_string(),
            },
        })
        .expect("error body serializes")
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

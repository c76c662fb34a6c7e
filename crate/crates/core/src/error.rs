use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the evaluation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The input does not follow the expected file layout.
    #[error("format error{}: {message}", location(.line))]
    Format {
        line: Option<usize>,
        message: String,
    },

    /// Well-formed input whose content violates a data invariant. `row` is
    /// 0-based for matrix rows and 1-based for lines of text.
    #[error("data error{}: {message}", row_location(.row))]
    Data { row: Option<usize>, message: String },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// Arguments outside the domain of an operation (dimension mismatch, bad parameters).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    /// Every token of a sentence is missing from the word-vector table.
    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("manifest error: {0}")]
    Manifest(String),
}

fn location(line: &Option<usize>) -> String {
    line.map(|l| format!(" at line {l}")).unwrap_or_default()
}

fn row_location(row: &Option<usize>) -> String {
    row.map(|r| format!(" at row {r}")).unwrap_or_default()
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(message: impl Into<String>) -> Self {
        Error::Format {
            line: None,
            message: message.into(),
        }
    }

    pub(crate) fn format_at(line: usize, message: impl Into<String>) -> Self {
        Error::Format {
            line: Some(line),
            message: message.into(),
        }
    }

    pub(crate) fn data(message: impl Into<String>) -> Self {
        Error::Data {
            row: None,
            message: message.into(),
        }
    }

    pub(crate) fn data_at(row: usize, message: impl Into<String>) -> Self {
        Error::Data {
            row: Some(row),
            message: message.into(),
        }
    }

    /// Process exit code for the command-line front end.
    ///
    /// `2` covers usage, format and input-validation problems; `1` covers
    /// failures of the computation itself.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. }
            | Error::Format { .. }
            | Error::Data { .. }
            | Error::Domain(_)
            | Error::Manifest(_) => 2,
            Error::InsufficientData(_) | Error::Numerical(_) | Error::Coverage(_) => 1,
        }
    }
}

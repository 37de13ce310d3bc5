//! Crate-wide error type.

use thiserror::Error;

use crate::lp::mps::MpsError;

/// Outcome of a presolve or rank check that proves the LP has no optimum.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Verdict {
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unbounded: {0}")]
    Unbounded(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("mps parse error: {0}")]
    Mps(#[from] MpsError),
    #[error(transparent)]
    Verdict(#[from] Verdict),
    #[error("invalid sparse matrix: {0}")]
    Sparse(String),
    #[error("rank deficient matrix: {deficient_rows} of {rows} rows are dependent")]
    RankDeficient { rows: usize, deficient_rows: usize },
    #[error("iterate not strictly positive at index {index} ({which} = {value})")]
    NotStrictlyPositive {
        which: &'static str,
        index: usize,
        value: f64,
    },
    #[error("dimension mismatch for {what}: expected {expected}, got {got}")]
    Dimension {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("numerical failure in {context}: {detail}")]
    Numerical { context: String, detail: String },
    #[error("size limit exceeded: {0}")]
    Limit(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("estimation failed: {0}")]
    Estimation(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn numerical(context: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Numerical {
            context: context.into(),
            detail: detail.into(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

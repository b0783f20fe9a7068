use std::path::PathBuf;

use crate::field::Domain;

/// Errors reported by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("expected a {expected} field, got a {found} field")]
    DomainMismatch { expected: Domain, found: Domain },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("support does not fit the grid: {0}")]
    SupportTooLarge(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
    #[error("resampling out of range: {0}")]
    OutOfRange(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("field violates its support: {0}")]
    SupportViolation(String),
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },
    #[error("shift gap too small: {0}")]
    ShiftGap(String),
    #[error("requested modes below numerical floor: {0}")]
    SpectrumFloor(String),
    #[error("multiplier vanishes on the grid and no regularization was given: {0}")]
    CtfZero(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, msg: impl std::fmt::Display) -> Self {
        Error::Format { path: path.into(), msg: msg.to_string() }
    }
}

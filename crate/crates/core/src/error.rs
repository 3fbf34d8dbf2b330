use thiserror::Error;

/// Errors raised by kernel operations.
///
/// Failed mathematical checks are never errors; they are reported through
/// [`crate::report::Report`] values instead.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("window error: need window {needed}, have {available}")]
    Window { needed: usize, available: usize },
    #[error("window error: {0}")]
    WindowPrecondition(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by model construction and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a domain constraint (range, sign, size).
    #[error("domain error: {0}")]
    Domain(String),
    /// A configuration is inconsistent or insufficient for the requested
    /// computation (e.g. a sample rate too low for the signal bandwidth).
    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

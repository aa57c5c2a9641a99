use thiserror::Error;

use crate::extremum::ExtremumCertificate;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A computation would exceed its size or evaluation budget.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Extremum search ran out of budget; carries the best certificate found so far.
    #[error("evaluation budget exhausted: {message}")]
    Budget {
        message: String,
        partial: Box<ExtremumCertificate>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn resource(msg: impl Into<String>) -> Self {
        Error::Resource(msg.into())
    }

    /// True for the resource and budget family; the CLI maps these to exit code 3.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::Resource(_) | Error::Budget { .. })
    }
}

//! Error type shared by all modules.

use thiserror::Error;

/// Toolkit-wide error type.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input outside a model's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration or program field failed validation.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// Bit stream synchronization failed while hunting for a sync word.
    #[error("sync error at bit offset {offset}: sync word not matched")]
    Sync { offset: usize },

    /// Bit stream had the wrong length.
    #[error("length error: expected {expected} bits, got {actual}")]
    Length { expected: usize, actual: usize },

    /// A data frame failed its header or parity check.
    #[error("frame error in frame {index}: {reason}")]
    Frame { index: usize, reason: String },
}

impl Error {
    pub fn domain(message: impl Into<String>) -> Self {
        Error::Domain(message.into())
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

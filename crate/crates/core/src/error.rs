use thiserror::Error;

use crate::vqe::VqeTrace;

/// Errors raised anywhere in the workbench.
#[derive(Debug, Error)]
pub enum VqeError {
    /// Operands disagree on a dimension (qubit count, orbital index, vector length).
    #[error("size mismatch: {0}")]
    Size(String),

    /// A configured cap (dense qubit limit, density-matrix limit) would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A gate parameter could not be resolved against the parameter vector.
    #[error("parameter binding error: {0}")]
    Binding(String),

    /// A precondition of an operation was violated.
    #[error("contract violation: {0}")]
    Contract(String),

    /// Malformed text input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// The numerics broke down (NaN cost, singular matrix).
    #[error("numerical error: {message}")]
    Numerical {
        message: String,
        /// Optimisation history up to the failure, when one was running.
        trace: Option<Box<VqeTrace>>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl VqeError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        VqeError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn numerical(message: impl Into<String>) -> Self {
        VqeError::Numerical {
            message: message.into(),
            trace: None,
        }
    }
}

pub type Result<T, E = VqeError> = std::result::Result<T, E>;

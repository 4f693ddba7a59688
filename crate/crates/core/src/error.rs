use thiserror::Error;

use crate::report::ValidationReport;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("set is not convex: {0}")]
    NotConvex(String),

    #[error("empty set where a nonempty one is required: {0}")]
    EmptySet(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("validation failed: {0}")]
    Validation(ValidationReport),

    #[error("{what} exceeds guard: {actual} > {limit}")]
    Guard {
        what: String,
        limit: usize,
        actual: usize,
    },

    #[error("{field}: {message}")]
    Schema { field: String, message: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unsupported format version {found:?} (expected {expected:?})")]
    Version { found: String, expected: String },

    /// A structural identity that must hold for valid input failed.
    #[error("invariant {statement} failed: {witness}")]
    Invariant { statement: String, witness: String },
}

impl Error {
    pub(crate) fn invariant(statement: &str, witness: impl Into<String>) -> Self {
        Error::Invariant {
            statement: statement.to_string(),
            witness: witness.into(),
        }
    }

    pub(crate) fn guard(what: &str, limit: usize, actual: usize) -> Self {
        Error::Guard {
            what: what.to_string(),
            limit,
            actual,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate error type.

use thiserror::Error;

/// Errors produced by the physics and device models.
///
/// Variants are grouped by how a front end should treat them: bad input
/// data ([`Error::Config`]), a violated physical precondition or operating
/// regime ([`Error::Precondition`]), and routing/scheduling failures
/// ([`Error::Unroutable`]).
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed configuration, file, or argument.
    #[error("config error: {0}")]
    Config(String),

    /// A physical precondition or validity regime was violated.
    /// `assumption` names the violated condition.
    #[error("precondition violated ({assumption}): {details}")]
    Precondition { assumption: String, details: String },

    /// No legal route exists between two cells; `blocking_cut` lists the
    /// blocked cells on the frontier of the reachable region.
    #[error("unreachable: no path from {from} to {to}; blocking cut: {cut}")]
    Unroutable { from: String, to: String, cut: String },

    /// Schedule compilation failed for a specific circuit operation.
    #[error("cannot compile circuit op #{op_index}: {details}")]
    Uncompilable { op_index: usize, details: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn precondition(assumption: impl Into<String>, details: impl Into<String>) -> Self {
        Error::Precondition {
            assumption: assumption.into(),
            details: details.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

//! Crate-wide error type.
//!
//! Variants are grouped by how callers are expected to react: malformed
//! input, violated operation preconditions, capacity refusals, and internal
//! verification failures (the last signal a soundness bug and are never
//! downgraded).

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// Two values from different algebras were combined.
    #[error("algebra mismatch: {context}")]
    AlgebraMismatch { context: String },

    /// Two values over different groups were combined.
    #[error("group mismatch: {context}")]
    GroupMismatch { context: String },

    /// Malformed or inconsistent input data (bad record, bad literal, bad table).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation's documented precondition does not hold for the given input.
    #[error("precondition failed: {what}{}", witness.as_ref().map(|w| format!(" (witness: {w})")).unwrap_or_default())]
    PreconditionFailed { what: String, witness: Option<String> },

    /// A size cap was exceeded; the operation refuses rather than approximates.
    #[error("capacity exceeded: {what} requires {requested}, cap is {limit}")]
    CapacityExceeded { what: String, limit: usize, requested: usize },

    /// A sampled (non-exhaustive) check was requested without an explicit seed.
    #[error("seed required: {0} is sampled at this size and needs an explicit seed")]
    SeedRequired(String),

    /// An internal certificate or postcondition replay failed. This is a bug,
    /// never a property of the input.
    #[error("internal verification failed: {0}")]
    VerificationFailed(String),
}

impl Error {
    pub fn precondition(what: impl Into<String>) -> Self {
        Error::PreconditionFailed { what: what.into(), witness: None }
    }

    pub fn precondition_with(what: impl Into<String>, witness: impl Into<String>) -> Self {
        Error::PreconditionFailed { what: what.into(), witness: Some(witness.into()) }
    }
}

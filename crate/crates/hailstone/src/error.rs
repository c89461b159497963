//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A map parameter failed validation; `field` names the offender.
    #[error("invalid map: {field} must be a positive odd integer, got {value}")]
    InvalidMapField { field: &'static str, value: u64 },

    #[error("invalid map: name must be nonempty")]
    EmptyMapName,

    #[error("unknown map preset {0:?} (expected one of \"3n+1\", \"5n+1\", \"3n+5\")")]
    UnknownPreset(String),

    #[error("seeds must be >= 1")]
    InvalidSeed,

    #[error("invalid bounds: {0}")]
    InvalidBounds(String),

    #[error("invalid range: lo={lo}, hi={hi} (need 1 <= lo <= hi)")]
    InvalidRange { lo: u64, hi: u64 },

    #[error("workers must be >= 1")]
    InvalidWorkers,

    #[error("invalid cycle: {0}")]
    InvalidCycle(String),

    /// A cycle shares some but not all elements with a cataloged one,
    /// or a catalog file fails validation on load.
    #[error("catalog corruption: {0}")]
    CatalogCorruption(String),

    #[error("map mismatch: expected {expected}, got {found}")]
    MapMismatch { expected: String, found: String },

    /// Memo was built under a different map or under smaller bounds than
    /// requested; serving from it could misclassify.
    #[error("memo mismatch: {0}")]
    MemoMismatch(String),

    #[error("claim verifier precondition failed: {0}")]
    ClaimPrecondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Format(String),
}

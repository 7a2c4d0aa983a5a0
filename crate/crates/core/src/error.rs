//! Error type shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A model invariant is violated (off-sheet point, non-Lorentz matrix,
    /// excessive normalization drift).
    #[error("model invariant violated: {0}")]
    Model(String),

    /// Degenerate input (coincident points, zero-length direction, ...).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// Argument outside an operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A mathematical precondition does not hold.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Asymptotic geodesics share an ideal endpoint; no common perpendicular.
    #[error("no common perpendicular: {0}")]
    NoPerpendicular(String),

    /// A region is empty (e.g. Margulis region of a large-translation
    /// loxodromic); distances involving it follow the +infinity convention.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// Operation requires a loxodromic (or otherwise specific) class.
    #[error("isometry class error: {0}")]
    Class(String),

    /// Scaffold construction failed at the named index.
    #[error("scaffold build error at index {index}: {reason}")]
    Build { index: usize, reason: String },

    /// Bounded search exhausted without success.
    #[error("not found: {0}")]
    NotFound(String),

    /// A limit process did not settle within its schedule.
    #[error("inconclusive: {0}")]
    Inconclusive(String),

    /// Malformed input document.
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Process exit code for the CLI surface: 2 input error, 3 mathematical
    /// precondition failure, 4 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Domain(_) => 2,
            Error::Inconclusive(_) => 4,
            _ => 3,
        }
    }
}

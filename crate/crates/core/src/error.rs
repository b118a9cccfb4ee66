//! Crate-wide error type and its coarse severity classification.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// How a failure should be reported at a process boundary.
///
/// `InvalidInput` covers malformed or mathematically inadmissible inputs,
/// `Inconclusive` covers searches stopped by an explicit cap, and `Internal`
/// marks violated invariants that indicate a bug rather than bad input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    InvalidInput,
    Inconclusive,
    Internal,
}

#[derive(Debug, Error)]
pub enum Error {
    // ---- polynomial arithmetic ----
    #[error("polynomial rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("inexact polynomial division")]
    InexactDivision,
    #[error("evaluation at a zero coordinate (position {0})")]
    ZeroCoordinate(usize),
    #[error("cannot parse polynomial {text:?}: {reason}")]
    PolyParse { text: String, reason: String },

    // ---- matrices, symmetrizers, permutations ----
    #[error("matrix is not skew-symmetrizable: {0}")]
    NotSymmetrizable(String),
    #[error("matrix has a nonzero diagonal entry at position {0}")]
    NonzeroDiagonal(usize),
    #[error("sign condition violated at ({0}, {1})")]
    SignCondition(usize, usize),
    #[error("diagram is disconnected")]
    Disconnected,
    #[error("matrix is not skew-symmetric")]
    NotSkewSymmetric,
    #[error("invalid symmetrizer: {0}")]
    BadSymmetrizer(String),
    #[error("invalid permutation: {0}")]
    BadPermutation(String),
    #[error("cannot parse {text:?} as {what}: {reason}")]
    Parse {
        what: &'static str,
        text: String,
        reason: String,
    },

    // ---- seeds and classes ----
    #[error("mutation index {0} out of range for rank {1}")]
    IndexOutOfRange(usize, usize),
    #[error("cluster size {0} does not match matrix rank {1}")]
    ClusterSizeMismatch(usize, usize),
    #[error("seeds share a cluster but carry different exchange matrices")]
    MatrixMismatchOnCluster,
    #[error("state cap {cap} exceeded after exploring {explored} states")]
    CapExceeded { cap: usize, explored: usize },
    #[error("rank {0} too small for the requested invariant")]
    RankTooSmall(usize),

    // ---- automorphisms ----
    #[error("vertex map is not a graph automorphism: {0}")]
    NotAnAutomorphism(String),
    #[error("no labelled realization found for the requested automorphism")]
    NoRealization,

    // ---- unfoldings ----
    #[error("invalid unfolding data: {0}")]
    BadUnfolding(String),
    #[error("composite mutation undefined: block {0} is not arrow-free")]
    BlockNotFree(usize),
    #[error("block sizes incompatible with the permutation (block {0})")]
    BlockSizeMismatch(usize),
    #[error("unfolding does not hold: {0}")]
    UnfoldingInvalid(String),

    // ---- green sequences ----
    #[error("green-sequence search truncated after {explored} states (cap {cap})")]
    GreenTruncated { cap: usize, explored: usize },
    #[error("no aligning permutation matches the terminal framed quiver")]
    NoAlignment,

    // ---- bug traps ----
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    /// Classifies the error for process exit codes and reporting.
    pub fn severity(&self) -> Severity {
        use Error::*;
        match self {
            CapExceeded { .. } | GreenTruncated { .. } => Severity::Inconclusive,
            Internal(_) | NoAlignment | NoRealization => Severity::Internal,
            _ => Severity::InvalidInput,
        }
    }
}

/// Shorthand for `Error::Internal` with formatted context.
pub(crate) fn internal(msg: impl Into<String>) -> Error {
    Error::Internal(msg.into())
}

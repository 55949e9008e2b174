use thiserror::Error;

use crate::quantale::AxiomReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// Tables of the wrong shape, out-of-range entries, duplicate labels.
    #[error("malformed {what}: {detail}")]
    Malformed { what: &'static str, detail: String },

    #[error("quantale axioms violated:\n{0}")]
    QuantaleAxioms(AxiomReport),

    #[error("{what} too large: {size} exceeds the limit {cap}")]
    TooLarge { what: &'static str, size: u128, cap: u128 },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("base quantale mismatch: expected `{expected}`, found `{found}`")]
    BaseMismatch { expected: String, found: String },

    #[error("map is not monotone: {0}")]
    NotMonotone(String),

    #[error("hypothesis not met: {0}")]
    Hypothesis(String),

    /// A guaranteed post-condition did not hold. Always a bug.
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn malformed(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Malformed { what, detail: detail.into() }
    }
}

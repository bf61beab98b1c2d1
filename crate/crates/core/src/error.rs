use thiserror::Error;

/// Library errors. Agent and chore indices in messages are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("chore c{chore} out of range (m = {m})")]
    ChoreOutOfRange { chore: usize, m: usize },
    #[error("missing table entry for subset {0}")]
    MissingTableEntry(String),
    #[error("invalid oracle: {0}")]
    InvalidOracle(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("enumeration limit exceeded: {what} needs {needed}, limit {limit}")]
    EnumerationLimit { what: String, needed: String, limit: String },
    #[error("ratio undefined: agent {agent} has zero cost for chore c{chore}")]
    ZeroSingletonCost { agent: usize, chore: usize },
    #[error("no subset D exists: C(anchor ∪ pool) is below the threshold")]
    NoSuchSubset,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("extension precondition failed: agent {agent}, pool chore c{chore}, eligible agents {eligible:?} (need at least n-1)")]
    ExtensionPrecondition { agent: usize, chore: usize, eligible: Vec<usize> },
    #[error("internal error: {what} failed verification\n{trace}")]
    GuaranteeViolated { what: String, trace: String },
}

pub type Result<T> = std::result::Result<T, Error>;

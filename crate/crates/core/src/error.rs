use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("state labels must be non-empty")]
    EmptyLabel,
    #[error("duplicate state label `{0}`")]
    DuplicateLabel(String),
    #[error("a state set needs at least one state")]
    NoStates,
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("energy matrix must be {expected}x{expected}, row {row} has {found} entries")]
    NotSquare { expected: usize, row: usize, found: usize },
    #[error("energy matrix entry ({row},{col}) = {value} is not 0 or 1")]
    InvalidEntry { row: usize, col: usize, value: i64 },
    #[error("empty transfer path")]
    EmptyTransferPath,
    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("not a troublesome/consecutive pair: {0}")]
    NotConsecutive(String),
    #[error("Λ requires mixed degrees")]
    MixedDegreesRequired,
    #[error("enumeration requires a ρ± bound")]
    Unbounded,
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("crossing cap of {cap} exceeded after {done} applications of Λ")]
    CrossingCapExceeded { cap: usize, done: usize },
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
    #[error("incompatible series: {0}")]
    IncompatibleSeries(String),
    #[error("series supports at most {max} color symbols, got {got}")]
    TooManySymbols { max: usize, got: usize },
    #[error("monomial {0} falls below the declared q-exponent window")]
    NegativeExponent(String),
    #[error("non-convergent: {0}")]
    NonConvergent(String),
    #[error("unsupported request: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

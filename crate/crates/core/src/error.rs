use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: parse error: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: schema error: {msg}")]
    Schema { line: usize, msg: String },
    #[error("line {line}: element {element} out of range for universe of size {size}")]
    Range {
        line: usize,
        element: usize,
        size: usize,
    },
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    Arity {
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("element {element} outside universe of size {size}")]
    OutOfUniverse { element: usize, size: usize },
    #[error("tuple length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("structures have different signatures")]
    SignatureMismatch,
    #[error("tuple {0:?} must be injective")]
    NonInjective(Vec<usize>),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("invalid action system: {0}")]
    InvalidSystem(String),
    #[error("invalid base relation: {0}")]
    InvalidBaseRelation(String),
    #[error("unknown point {0}")]
    UnknownPoint(usize),
    #[error("unknown basis element {0}")]
    UnknownBasis(usize),
    #[error("level {requested} unavailable: {reason}")]
    LevelUnavailable { requested: String, reason: String },
    #[error("recursion depth {depth} exceeds configured cap {cap}")]
    DepthExceeded { depth: usize, cap: usize },
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("budget exceeded: {what} is {actual}, limit {limit}")]
    Budget {
        what: String,
        actual: u128,
        limit: u128,
    },
    #[error("usage: {0}")]
    Usage(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Input,
    Budget,
    Check,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Budget { .. } => ErrorKind::Budget,
            Error::InvalidBaseRelation(_) => ErrorKind::Check,
            _ => ErrorKind::Input,
        }
    }

    pub(crate) fn budget(what: impl Into<String>, actual: u128, limit: u128) -> Self {
        Error::Budget {
            what: what.into(),
            actual,
            limit,
        }
    }
}

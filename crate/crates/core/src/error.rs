use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("symbol {symbol} is not in an alphabet of size {size}")]
    InvalidSymbol { symbol: u32, size: usize },

    #[error("invalid word source: {0}")]
    InvalidSource(String),

    #[error("invalid block program: {0}")]
    InvalidProgram(String),

    #[error("source capacity exceeded: {requested} symbols requested, capacity is {capacity}")]
    CapacityExceeded { requested: usize, capacity: usize },

    #[error("marker not found within the first {horizon} symbols")]
    MarkerNotFound { horizon: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not strictly positive")]
    NotPositive,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("iteration budget of {budget} exhausted; last estimates {previous} and {last}")]
    BudgetExceeded {
        budget: usize,
        previous: f64,
        last: f64,
    },

    #[error("structurally nonzero entry ({row}, {col}) underflows to zero")]
    Underflow { row: usize, col: usize },

    #[error("underflow at position {position}: {source}")]
    UnderflowAt {
        position: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("insufficient context: {required} symbols required, {available} available")]
    InsufficientContext { required: usize, available: usize },

    #[error("positivity condition has no witness up to horizon {max_ell}")]
    ConditionUnsatisfied { max_ell: usize },

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(err: toml::de::Error) -> Self {
        Error::Config(err.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        Error::Io(err.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(err: serde_json::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

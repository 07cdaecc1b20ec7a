use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite coordinate at index {index}")]
    NonFinite { index: usize },

    #[error("out-of-order arrival: got {got} after {last}")]
    OutOfOrder { last: u64, got: u64 },

    #[error("empty center set")]
    EmptyCenters,

    #[error("window too small: need more than {needed} points, have {have}")]
    WindowTooSmall { needed: usize, have: usize },

    #[error("empty histogram")]
    EmptyHistogram,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no guess in the ladder qualifies at time {t}")]
    NoQualifyingGuess { t: u64 },

    #[error("radius grid exhausted at {last_rho} without meeting the outlier budget")]
    GridExhausted { last_rho: f64 },

    #[error("oracle guard: window of {n} points with k = {k} is too large for enumeration")]
    OracleTooLarge { n: usize, k: usize },

    #[error("counter overflow")]
    Overflow,

    #[error("snapshot: {0}")]
    Snapshot(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

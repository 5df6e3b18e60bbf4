use thiserror::Error;

/// Errors produced by the library. The CLI maps every variant to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid dimension: d must be at least 1")]
    InvalidDimension,

    #[error("index {index} out of range 1..={d}")]
    InvalidIndex { index: usize, d: usize },

    #[error("shifted multi-index leaves the lattice N^d at slot {slot}")]
    OutOfLattice { slot: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("insufficient moments: {0}")]
    InsufficientMoments(String),

    #[error("unsupported parameter: {0}")]
    UnsupportedParameter(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("functional has no mass factor (only classical weight families carry one)")]
    NoMassFactor,

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("degree {requested} exceeds available degree {available}")]
    DegreeOutOfRange { requested: usize, available: usize },

    #[error("internal consistency: {0}")]
    InternalConsistency(String),

    #[error("representation error: {0}")]
    Representation(String),

    #[error("insufficient depth: need level {needed}, sequences stop at {available}")]
    InsufficientDepth { needed: usize, available: usize },

    #[error("singular parameter: {0}")]
    SingularParameter(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Malformed(e.to_string())
    }
}

use thiserror::Error;

/// Errors raised by space construction, evaluation and the checkers.
///
/// Failed checks are never errors; they come back as reports with a
/// witness. Errors are reserved for malformed input and violated
/// preconditions.
#[derive(Debug, Error)]
pub enum FeltError {
    #[error("point {point} lies outside the domain of `{space}`")]
    OutOfDomain { space: String, point: String },

    #[error("index {index} is out of range for `{space}` with {n} points")]
    IndexOutOfRange {
        space: String,
        index: usize,
        n: usize,
    },

    #[error("map `{map}` sends {point} to {image}, which escapes the domain")]
    ImageEscapes {
        map: String,
        point: String,
        image: String,
    },

    #[error("distance p({x}, {y}) evaluated to {value}; distances must be finite and nonnegative")]
    InvalidDistance { x: String, y: String, value: f64 },

    #[error("map `{map}` cannot act on space `{space}`: {reason}")]
    Incompatible {
        map: String,
        space: String,
        reason: String,
    },

    #[error("point kind mismatch: {0}")]
    PointKind(String),

    #[error("invalid tolerances: {0}")]
    InvalidTolerance(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),

    #[error("enumeration cap exceeded: {0}")]
    CapExceeded(String),

    #[error("malformed space file: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, FeltError>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("length mismatch: state has {state} amplitudes, bit string has {bits} bits")]
    LengthMismatch { state: usize, bits: usize },

    #[error("state is not produced by any string of the set (best overlap {best_overlap:.12})")]
    NotInSet { best_overlap: f64 },

    #[error("integral {integral} outside measurable range [0, {range}); the protocol only resolves I mod αK")]
    IntegralOutOfRange { integral: f64, range: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code: 2 for bad arguments or inputs, 3 for numeric-domain failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidField(_)
            | Error::OutOfRange(_)
            | Error::LengthMismatch { .. }
            | Error::Parse(_)
            | Error::Io(_)
            | Error::Csv(_)
            | Error::Json(_) => 2,
            Error::NotInSet { .. } | Error::IntegralOutOfRange { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

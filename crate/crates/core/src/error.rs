use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the registration library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {dims:?}: {reason}")]
    InvalidGrid { dims: [usize; 3], reason: &'static str },

    #[error("grid mismatch: expected {expected:?}, found {found:?}")]
    GridMismatch { expected: [usize; 3], found: [usize; 3] },

    #[error("field length {found} does not match grid size {expected}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("trajectory mismatch: {0}")]
    TrajectoryMismatch(String),

    #[error("relative mismatch undefined: reference and template are identical")]
    ZeroDenominator,

    #[error("dice undefined: neither label map contains any of the requested labels")]
    EmptyLabelUnion,

    #[error("search direction is not a descent direction (slope {0:e})")]
    NotDescent(f64),

    #[error("missing header sidecar {0}")]
    MissingSidecar(PathBuf),

    #[error("unknown dtype tag {0:?}")]
    UnknownDtype(String),

    #[error("payload is {found} bytes, header implies {expected}")]
    PayloadSize { expected: usize, found: usize },

    #[error("malformed header: {0}")]
    Header(String),

    #[error("expected a {expected} volume, found {found}")]
    DtypeMismatch { expected: &'static str, found: &'static str },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

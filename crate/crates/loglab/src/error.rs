use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("operands live on different grids")]
    GridMismatch,

    #[error("operator kind mismatch: expected {expected}")]
    KindMismatch { expected: &'static str },

    #[error("zero input where a nonzero function is required")]
    ZeroInput,

    #[error("degenerate Nehari projection: exponent {0} outside [-50, 50]")]
    DegenerateProjection(f64),

    #[error("eigen solver did not converge within {0} iterations")]
    EigenNonConvergence(usize),

    #[error("{0}")]
    PathSearch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unsupported dimension {got} (this operation requires d = {required})")]
    UnsupportedDimension { got: usize, required: usize },

    #[error("infinite energy: points {0} and {1} coincide")]
    InfiniteEnergy(usize, usize),

    #[error("degenerate configuration: points {points:?} {message}")]
    Degenerate { points: Vec<usize>, message: String },

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn require_dim(got: usize, required: usize) -> Result<()> {
    if got == required {
        Ok(())
    } else {
        Err(Error::UnsupportedDimension { got, required })
    }
}

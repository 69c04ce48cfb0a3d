use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("infinite moment: {0}")]
    InfiniteMoment(String),
    #[error("not a valid trawl kernel: {0}")]
    InvalidKernel(String),
    #[error("matrix not positive definite (min pivot {min_pivot:e}, condition estimate {condition:e})")]
    NotPositiveDefinite { min_pivot: f64, condition: f64 },
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register label collision: {0}")]
    LabelCollision(String),
    #[error("unknown register: {0}")]
    UnknownRegister(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("map is not unitary: {0}")]
    NotUnitary(String),
    #[error("key sets of the two ensembles differ")]
    KeySetMismatch,
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

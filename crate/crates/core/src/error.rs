use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },
    #[error("algebra tag mismatch: {0} vs {1}")]
    TagMismatch(&'static str, &'static str),
    #[error("grade {0} outside -2..=2")]
    GradeOutOfRange(i32),
    #[error("expected a purely imaginary quaternion, got {0}")]
    NotImaginary(String),
    #[error("matrix is not of the g~_-1 shape: {0}")]
    NotRow4Shape(String),
    #[error("matrix is not in {0}")]
    NotInAlgebra(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation requires n = {required}, got n = {found}")]
    WrongDimension { required: usize, found: usize },
    #[error("no rational unit quaternion z with z i conj(z) = {0}")]
    NoRationalLift(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the supported maximum of {max}")]
    Size { dim: usize, max: usize },
    #[error("expected {expected} arguments, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("node {0:?} is inside the one-cell boundary margin")]
    Margin(Vec<usize>),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("containment error: {0}")]
    Containment(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

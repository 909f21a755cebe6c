use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("empty input")]
    EmptyInput,

    #[error("internal node at {path} has {arity} child(ren); at least 2 are required")]
    Arity { path: String, arity: usize },

    #[error("assignment has {got} bits but the tree has {expected} leaves")]
    LengthMismatch { expected: usize, got: usize },

    #[error("{what}: {actual} exceeds the configured bound {bound}")]
    BoundExceeded {
        what: &'static str,
        actual: u128,
        bound: u128,
    },

    #[error("unknown node path {0}")]
    UnknownPath(String),

    #[error("index {index} out of range for {len} children")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid algorithm: {0}")]
    InvalidAlgorithm(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("double oracle did not converge within {0} iterations")]
    NonTermination(usize),

    #[error("{0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

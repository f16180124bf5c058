use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("unsupported dimension {dim}: {message}")]
    UnsupportedDimension { dim: usize, message: String },

    #[error("unsupported representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("degenerate theory: {0}")]
    DegenerateTheory(String),

    #[error("matrix is not column-stochastic: {0}")]
    NotStochastic(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid rational literal {0:?}")]
    RationalLiteral(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn shape(msg: impl Into<String>) -> Error {
    Error::Shape(msg.into())
}

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        let full = e.to_string();
        let message = match full.rfind(" at line ") {
            Some(i) => full[..i].to_string(),
            None => full,
        };
        Error::Parse {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

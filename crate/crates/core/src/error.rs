use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Input is well-formed but carries no information for the requested
    /// computation (constant series, all-zero differences, ...).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("model error{}: {message}", word_index.map(|w| format!(" at answer word {w}")).unwrap_or_default())]
    Model {
        word_index: Option<usize>,
        message: String,
    },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}

pub(crate) fn degenerate<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::DegenerateInput(msg.into()))
}

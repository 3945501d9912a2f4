use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    /// The inputs are well formed but fall outside the degree regime the
    /// exploration is designed for.
    #[error("precondition unmet: {0}")]
    PreconditionUnmet(String),

    #[error("format error at position {position}: {message}")]
    Format { position: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn format(position: usize, msg: impl Into<String>) -> Self {
        Error::Format {
            position,
            message: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

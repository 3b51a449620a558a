use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// The document does not match its schema; `pointer` is a JSON pointer.
    #[error("schema violation at `{pointer}`: {message}")]
    Schema { pointer: String, message: String },

    #[error(transparent)]
    Core(#[from] codazzi_core::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("usage: {0}")]
    Usage(String),
}

impl Error {
    pub fn schema(pointer: &str, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.to_string(),
            message: message.into(),
        }
    }

    /// Parameters or inputs that cannot satisfy a precondition, as opposed
    /// to malformed ones.
    pub fn is_infeasible(&self) -> bool {
        matches!(
            self,
            Error::Core(codazzi_core::Error::Infeasible(_) | codazzi_core::Error::Precondition(_))
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("grid size {0} is not a power of two >= 4")]
    InvalidGrid(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("singular collocation matrix for {basis} basis with m = {m}")]
    SingularCollocation { basis: String, m: usize },

    #[error("malformed manifest: {0}")]
    MalformedManifest(String),

    #[error("unsupported manifest version {found} (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, BenchError>;

#[derive(Debug, Error)]
pub enum BenchError {
    /// Bad ids, parameters or inputs; exit code 2.
    #[error("{0}")]
    Precondition(String),
    /// Reading or writing a file failed; exit code 3.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl BenchError {
    pub fn precondition(msg: impl Into<String>) -> Self {
        BenchError::Precondition(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            BenchError::Precondition(_) => 2,
            BenchError::Io(_) => 3,
        }
    }
}

impl From<convprod::Error> for BenchError {
    fn from(e: convprod::Error) -> Self {
        match e {
            convprod::Error::Io(io) => BenchError::Io(io),
            other => BenchError::Precondition(other.to_string()),
        }
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => return BenchError::Io(io),
                other => return BenchError::Precondition(format!("{other:?}")),
            }
        }
        BenchError::Precondition(e.to_string())
    }
}

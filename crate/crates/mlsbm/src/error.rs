use std::io;
use std::path::PathBuf;

/// Failures of the experiment runner. [`Error::exit_code`] separates bad
/// input (1) from failures while doing the work (2).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Validation(String),

    #[error("{context}: {source}")]
    InvalidInput { context: String, source: mlsbm_core::Error },

    #[error(transparent)]
    Core(#[from] mlsbm_core::Error),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {source}", path.display())]
    Csv { path: PathBuf, source: csv::Error },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::InvalidInput { .. } => 1,
            Error::Core(_) | Error::Io { .. } | Error::Csv { .. } => 2,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>) -> impl FnOnce(csv::Error) -> Error {
        let path = path.into();
        move |source| Error::Csv { path, source }
    }

    pub(crate) fn invalid(context: impl Into<String>) -> impl FnOnce(mlsbm_core::Error) -> Error {
        let context = context.into();
        move |source| Error::InvalidInput { context, source }
    }
}

macro_rules! bail {
    ($($arg:tt)*) => {
        return Err($crate::error::Error::Validation(format!($($arg)*)))
    };
}
pub(crate) use bail;

use std::path::PathBuf;

use qualc_core::emit::EmitError;
use qualc_core::geo::GeoError;
use qualc_core::solver::{BruteForceError, SolveError};
use qualc_core::{InvalidCalculus, NetworkError};

use crate::format::ParseError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: ParseError,
    },
    #[error("{path}: {message}")]
    Csv { path: PathBuf, message: String },
    #[error(transparent)]
    Calculus(#[from] InvalidCalculus),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Emit(#[from] EmitError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    Geo(#[from] GeoError),
    #[error(transparent)]
    BruteForce(#[from] BruteForceError),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
    let path = path.into();
    move |source| Error::Io { path, source }
}

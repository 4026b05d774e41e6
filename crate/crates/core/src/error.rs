use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("basis document contains no element blocks")]
    EmptyBasis,

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("overlap matrix is linearly dependent (smallest eigenvalue {min_eigenvalue:e})")]
    LinearDependence { min_eigenvalue: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("variational bound violated: E_HF - E_FCI = {0:e}")]
    VariationalViolation(f64),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(
        "SCF did not converge after {iterations} iterations (last dE = {delta_energy:e}, rms dD = {rms_density:e})"
    )]
    ScfNotConverged {
        iterations: usize,
        delta_energy: f64,
        rms_density: f64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

use std::path::PathBuf;

/// Error type shared across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("site capacity exceeded: {requested} sites (limit {limit})")]
    Capacity { requested: u128, limit: u64 },

    #[error("site index {index} out of range (N = {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("geometry does not match the requested variant: {0}")]
    GeometryMismatch(String),

    #[error("singular value decomposition failed for a {rows}x{cols} block")]
    SvdFailed { rows: usize, cols: usize },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}

use std::fmt;
use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// One broken invariant in a parsed document, located by a JSON-style path
/// such as `annotations[3].bbox`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),

    #[error("malformed image: {0}")]
    MalformedImage(String),

    #[error("invalid JSON at {path}: {message}")]
    Json { path: String, message: String },

    #[error("{} violation(s): {}", .0.len(), join_violations(.0))]
    Invalid(Vec<Violation>),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("out of bounds: {0}")]
    OutOfBounds(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty region has no bounding box")]
    EmptyRegion,

    #[error("unknown image id {0}")]
    UnknownImage(u64),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("png encoding: {0}")]
    PngEncode(#[from] png::EncodingError),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(err: serde_path_to_error::Error<serde_json::Error>) -> Self {
        let path = err.path().to_string();
        let inner = err.into_inner();
        Error::Json {
            path,
            message: inner.to_string(),
        }
    }
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

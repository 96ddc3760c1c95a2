use std::path::PathBuf;

/// Errors produced anywhere in the segmentation and evaluation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("beat positions are not strictly increasing at line {line}: {position} after {previous}")]
    Order {
        line: usize,
        previous: usize,
        position: usize,
    },

    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("no beat candidates found in the divergence profile")]
    EmptyResult,

    #[error("no pair of consecutive systoles separated by a diastole was found: {0}")]
    NoAnchor(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("file pairing failed: {0}")]
    Pairing(String),

    #[error("cannot aggregate an empty set of reports")]
    EmptyCorpus,
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for the failure modes that mean "this recording cannot be
    /// segmented" as opposed to a bad input file or a bug.
    pub fn is_unsegmentable(&self) -> bool {
        matches!(self, Error::NoAnchor(_) | Error::EmptyResult)
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by any stage of the chord estimation pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Chord symbol text that does not parse at all.
    #[error("malformed chord label `{0}`")]
    MalformedLabel(String),

    /// A syntactically valid chord outside the SeventhsBass vocabulary.
    #[error("chord label `{0}` is outside the SeventhsBass vocabulary")]
    OutOfVocabulary(String),

    /// Underlying I/O failure, annotated with the path involved.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Audio file in a codec we do not decode.
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),

    /// Parameter outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Tensor or feature dimensions that do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// Training loss became NaN or infinite.
    #[error("non-finite loss at iteration {iteration}")]
    NonFiniteLoss { iteration: usize },

    /// Ground-truth annotation intervals that overlap or run backwards.
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),

    /// Text that fails to parse, with its source line.
    #[error("parse error at {path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    /// Timed segments that overlap where a partition was required.
    #[error("overlapping segments at {0:.6} s")]
    Overlap(f64),

    /// Evaluation against an empty ground truth.
    #[error("ground truth is empty")]
    EmptyTruth,

    /// Segment lists that do not cover the same time span.
    #[error("coverage mismatch: {0}")]
    CoverageMismatch(String),

    /// Feature files missing for a track that should have been extracted.
    #[error("missing features for track `{0}`")]
    MissingFeatures(String),

    /// Track present in one directory but not the other.
    #[error("missing track(s): {0}")]
    MissingTrack(String),

    /// Malformed configuration file or value.
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

/// Errors produced while reading or validating word alignments and lexicons.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum AlignError {
    #[error("line {line}: malformed alignment item {item:?}")]
    Parse { line: usize, item: String },

    #[error("line {line}: link {src}-{tgt} out of bounds for pair of lengths {src_len}/{tgt_len}")]
    OutOfBounds {
        line: usize,
        src: usize,
        tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },

    #[error("links violate the one-to-one constraint at {src}-{tgt}")]
    NotOneToOne { src: usize, tgt: usize },

    #[error("lexicon line {line}: {reason}")]
    Lexicon { line: usize, reason: String },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TransformError {
    #[error("task `{task}` needs {what}, which was not supplied")]
    MissingContext {
        task: &'static str,
        what: &'static str,
    },

    #[error("alignment link {src}-{tgt} out of bounds for pair of lengths {src_len}/{tgt_len}")]
    OutOfBounds {
        src: usize,
        tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },

    #[error("replace needs a non-empty lexicon")]
    EmptyLexicon,
}

#[derive(Debug, Error, PartialEq)]
pub enum MetricsError {
    #[error("empty reference")]
    EmptyReference,

    #[error("length mismatch: {what} has {got} sentences, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        got: usize,
        expected: usize,
    },

    #[error("bin width must be positive, got {0}")]
    BinWidth(f64),

    #[error("cannot build a histogram from zero scores")]
    EmptyScores,

    #[error("score {0} outside [0, 100]")]
    ScoreRange(f64),
}

/// Top-level error. The CLI maps [`Error::is_config`] to exit status 1 and
/// everything else to 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Align {
        path: PathBuf,
        #[source]
        source: AlignError,
    },

    #[error("line {line}: {source}")]
    Transform {
        line: usize,
        #[source]
        source: TransformError,
    },

    #[error(transparent)]
    Metrics(#[from] MetricsError),

    #[error("line count mismatch: {path} has {got} lines, expected {expected}")]
    LineCount {
        path: PathBuf,
        got: usize,
        expected: usize,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_)
                | Error::Transform {
                    source: TransformError::MissingContext { .. } | TransformError::EmptyLexicon,
                    ..
                }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

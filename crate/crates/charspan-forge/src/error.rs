//! Crate-wide error type.

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForgeError>;

/// Coarse classification used by the CLI to pick a process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad configuration or malformed input data (exit code 1).
    Validation,
    /// Filesystem or encoding failures (exit code 2).
    Io,
    /// An internal invariant was violated; indicates a bug (exit code 3).
    Internal,
}

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: invalid UTF-8 on line {line}")]
    InvalidUtf8 { path: PathBuf, line: usize },

    #[error("sentence on line {line} contains a line-break character")]
    LineBreakInSentence { line: usize },

    #[error("aligned corpora have unequal line counts: source has {source_lines}, target has {target_lines}")]
    LineCountMismatch {
        source_lines: usize,
        target_lines: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("input lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty corpus")]
    EmptyCorpus,

    #[error("invalid noise event: {0}")]
    InvalidEvent(String),

    #[error("{path}: expected header `{expected}`")]
    MissingHeader { path: PathBuf, expected: String },

    #[error("{path}: malformed line {line}: {message}")]
    MalformedLine {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("malformed segmentation: {0}")]
    MalformedSegmentation(String),

    #[error("vector dimension mismatch on line {line}: expected {expected}, found {found}")]
    DimensionMismatch {
        line: usize,
        expected: usize,
        found: usize,
    },

    #[error("zero vector on line {line}")]
    ZeroVector { line: usize },

    #[error("unsupported script `{0}`")]
    UnsupportedScript(String),

    #[error("inconsistent plan trace: {0}")]
    InconsistentTrace(String),

    #[error("pipeline stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<ForgeError>,
    },

    #[error("internal invariant violation: {0}")]
    Internal(String),
}

impl ForgeError {
    pub fn kind(&self) -> ErrorKind {
        match self {
            ForgeError::Io { .. } | ForgeError::InvalidUtf8 { .. } => ErrorKind::Io,
            ForgeError::Internal(_) => ErrorKind::Internal,
            ForgeError::Stage { source, .. } => source.kind(),
            _ => ErrorKind::Validation,
        }
    }

    /// Process exit code for the CLI: 1 validation, 2 I/O, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Validation => 1,
            ErrorKind::Io => 2,
            ErrorKind::Internal => 3,
        }
    }

    /// Wraps an I/O failure with the path it happened on.
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        ForgeError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn stage(stage: &'static str) -> impl FnOnce(ForgeError) -> ForgeError {
        move |source| ForgeError::Stage {
            stage,
            source: Box::new(source),
        }
    }
}

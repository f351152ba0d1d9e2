use std::io;

use thiserror::Error;

/// Failures while parsing a compressed container or a domain profile.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("truncated input: needed {needed} bytes at offset {offset}, {available} available")]
    Truncated {
        offset: usize,
        needed: usize,
        available: usize,
    },
    #[error("bad magic bytes {found:02x?}")]
    BadMagic { found: [u8; 4] },
    #[error("unsupported format version {found} (expected {expected})")]
    UnsupportedVersion { found: u8, expected: u8 },
    #[error("length mismatch: header implies {expected} bytes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("inconsistent header: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("undefined metric: {0}")]
    Domain(String),
    #[error("training failed: {0}")]
    Training(String),
    #[error("corrupt stream at word {word}: {reason}")]
    CorruptWord { word: usize, reason: String },
    #[error("corrupt stream: {0}")]
    Corrupt(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("internal error: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Param(msg.into())
    }

    /// True for failures caused by damaged or malformed compressed data.
    pub fn is_corruption(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::Corrupt(_) | Error::CorruptWord { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::fmt;

use thiserror::Error;

use crate::model::ModelError;

/// A located failure while reading one of the text formats.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line number, 0 when the problem is not tied to a line.
    pub line: usize,
    pub reason: String,
}

impl ParseError {
    pub fn new(line: usize, reason: impl Into<String>) -> Self {
        ParseError {
            line,
            reason: reason.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.reason)
        } else {
            write!(f, "line {}: {}", self.line, self.reason)
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("corpora do not match: {0}")]
    MismatchedCorpora(String),

    #[error("missing metadata: {0}")]
    MissingMetadata(String),

    #[error("pairing failed: {0}")]
    Pairing(#[from] crate::corpus::PairingError),

    #[error("insufficient data for language {lang}: need {needed} pairs, have {available}")]
    InsufficientData {
        lang: String,
        needed: usize,
        available: usize,
    },

    #[error("unsupported model version: {0}")]
    VersionMismatch(String),

    #[error("cannot train on an empty corpus")]
    EmptyCorpus,

    #[error("invalid predicate index {index} for sentence {sentence} of length {length}")]
    InvalidPredicateIndex {
        sentence: String,
        index: usize,
        length: usize,
    },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

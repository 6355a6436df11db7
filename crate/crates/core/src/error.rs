use std::io;

use thiserror::Error;

use crate::bpe::TokenId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown byte domain {0:?} (expected utf8 or utf16le)")]
    UnknownDomain(String),

    #[error("character {0:?} is not a byte display symbol")]
    UnknownDisplaySymbol(char),

    #[error(
        "target vocabulary size {target} is below the minimum of {minimum} (256 bytes + specials)"
    )]
    VocabTooSmall { target: usize, minimum: usize },

    #[error("invalid special token name {0:?}")]
    InvalidSpecial(String),

    #[error("token id {0} is not in the vocabulary")]
    UnknownTokenId(TokenId),

    #[error("merge would create a token that is already in the vocabulary")]
    DuplicateToken,

    #[error("malformed model file at line {line}: {message}")]
    ModelFormat { line: usize, message: String },

    #[error("line {line} has {chars} characters, above the limit of {max}")]
    LineTooLong {
        line: usize,
        chars: usize,
        max: usize,
    },

    #[error("line {line} is not valid UTF-8")]
    InvalidUtf8 { line: usize },

    #[error("need at least {needed} partitions, got {got}")]
    TooFewPartitions { needed: usize, got: usize },

    #[error("partition {0:?} has no utterances")]
    EmptyPartition(String),

    #[error("duplicate tag {0:?}")]
    DuplicateTag(String),

    #[error("baseline value {0} must be positive")]
    NonPositiveBaseline(f64),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn format(line: usize, message: impl Into<String>) -> Self {
        Error::ModelFormat {
            line,
            message: message.into(),
        }
    }
}

use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: malformed line ({reason})")]
    MalformedLine { line: usize, reason: String },

    #[error("corpus `{0}` contains no sentences")]
    EmptyCorpus(String),

    #[error("line {line}: token prefix `{found}:` does not match declared language `{expected}`")]
    LanguageMismatch {
        line: usize,
        expected: String,
        found: String,
    },

    #[error("line {line}: unexpected tag `{tag}` ({reason})")]
    UnexpectedTag {
        line: usize,
        tag: String,
        reason: String,
    },

    #[error("unknown language code `{0}` (expected hi, mr or mixed)")]
    UnknownLanguage(String),

    #[error("IOB class `{0}` is not covered by the class map")]
    UnmappedClass(String),

    #[error("tag `{0}` is not covered by the tag map")]
    UnmappedTag(String),

    #[error("`{0}` is not a valid IOB tag")]
    InvalidIobTag(String),

    #[error("invalid tag map: {0}")]
    InvalidTagMap(String),

    #[error("need at least {needed} sentences to split, corpus has {found}")]
    TooFewSentences { needed: usize, found: usize },

    #[error("invalid split spec: {0}")]
    InvalidSplit(String),

    #[error("scheme mismatch: {0}")]
    SchemeMismatch(String),

    #[error("tag `{0}` is not in the label vocabulary")]
    UnknownTag(String),

    #[error("encoder `{key}` is unavailable: {reason}")]
    EncoderUnavailable { key: String, reason: String },

    #[error("unknown encoder key `{0}`")]
    UnknownEncoder(String),

    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),

    #[error("corrupt artifact at {path}: {reason}")]
    CorruptArtifact { path: PathBuf, reason: String },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duplicate cell: test `{test_dataset}`, regime `{regime}`, encoder `{encoder}`")]
    DuplicateCell {
        test_dataset: String,
        regime: String,
        encoder: String,
    },

    #[error("corrupt run store entry {path}: {reason}")]
    CorruptStore { path: PathBuf, reason: String },

    #[error("invalid experiment config: {0}")]
    Experiment(String),

    #[error("invalid filter expression: {0}")]
    InvalidFilter(String),

    #[error("cell (regime `{regime}`, encoder `{encoder}`): {source}")]
    Cell {
        regime: String,
        encoder: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },

    #[error("tensor backend: {0}")]
    Backend(#[from] candle_core::Error),

    #[error("tokenizer: {0}")]
    Tokenizer(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Whether the error stems from bad input or configuration rather than a
    /// failure while doing work. The command-line tool maps this to exit code 1.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Cell { source, .. } | Error::File { source, .. } => source.is_validation(),
            // a named input that does not exist is a usage problem
            Error::Io(e) => e.kind() == std::io::ErrorKind::NotFound,
            Error::Backend(_)
            | Error::Tokenizer(_)
            | Error::Csv(_)
            | Error::EncoderUnavailable { .. }
            | Error::CorruptArtifact { .. }
            | Error::CorruptStore { .. } => false,
            _ => true,
        }
    }

    pub fn in_file(self, path: impl Into<PathBuf>) -> Error {
        Error::File {
            path: path.into(),
            source: Box::new(self),
        }
    }
}

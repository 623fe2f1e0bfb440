use std::path::PathBuf;

use thiserror::Error;

use crate::gendering::GenderLabel;
use crate::lexicon::ClassificationSystem;
use crate::scoring::ReferenceKind;

/// Errors raised by the audit library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}:{line}: malformed row: {reason}", path.display())]
    MalformedRow {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{}:{line}: occupation `{occupation}` references unknown {system} category `{code}`", path.display())]
    MissingCategory {
        path: PathBuf,
        line: u64,
        occupation: String,
        system: ClassificationSystem,
        code: String,
    },

    #[error("{}:{line}: duplicate occupation `{name}`", path.display())]
    DuplicateOccupation {
        path: PathBuf,
        line: u64,
        name: String,
    },

    #[error("{}:{line}: occupation `{occupation}` references unknown sector `{sector}`", path.display())]
    UnknownSector {
        path: PathBuf,
        line: u64,
        occupation: String,
        sector: String,
    },

    #[error("{0} is not a statistical reference")]
    NotStatistical(ReferenceKind),

    #[error("Likert response {0} is outside 1..=6")]
    OutOfRange(i64),

    #[error("survey tally for `{0}` has no responses")]
    EmptyTally(String),

    #[error("template `{template}`: {reason}")]
    PlaceholderMismatch { template: String, reason: String },

    #[error("{}:{line}: malformed fixture: {reason}", path.display())]
    MalformedFixture {
        path: PathBuf,
        line: u64,
        reason: String,
    },

    #[error("{}:{line}: cache line failed its integrity check", path.display())]
    CacheCorrupt { path: PathBuf, line: u64 },

    #[error("label {0} cannot be scored")]
    UnscorableLabel(GenderLabel),

    #[error("error points {e_t} below optimal error {e_o}")]
    InvalidOrder { e_t: f64, e_o: f64 },

    #[error("no {reference} reference value for occupation `{occupation}`")]
    MissingReference {
        occupation: String,
        reference: ReferenceKind,
    },

    #[error("empty group: {0}")]
    EmptyGroup(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid weight {weight} for occupation `{occupation}`")]
    InvalidWeight { occupation: String, weight: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

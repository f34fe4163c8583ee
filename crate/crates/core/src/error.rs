use std::io;

use thiserror::Error;

use crate::types::Period;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// A malformed row or header in one of the text formats. `line` is 1-based.
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: u64,
        field: String,
        message: String,
    },

    #[error("unknown top-level category {label:?}; valid labels are: {valid}")]
    UnknownCategory { label: String, valid: String },

    #[error("duplicate venue_id {0:?}")]
    DuplicateVenue(String),

    #[error("{} venue(s) have no zip code: {}", .0.len(), .0.join(", "))]
    UnresolvedVenues(Vec<String>),

    #[error("transition references unknown venue_id {0:?}")]
    UnknownVenue(String),

    #[error("zip {0:?} is not part of the network node set")]
    UnknownZip(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("empty area: zip {0:?} has no venues")]
    EmptyArea(String),

    #[error("no checkin mass attributed to zip {0:?}")]
    NoCheckinMass(String),

    #[error("no walkable nodes in the {0} network")]
    NoWalkableNodes(Period),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("degenerate similarity vector: {0}")]
    Degenerate(String),

    #[error("node alignment failed: {0}")]
    Alignment(String),

    #[error("walk corpus references node index {0} outside the vocabulary")]
    Vocabulary(usize),
}

impl Error {
    pub(crate) fn parse(line: u64, field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    /// Whether the error stems from reading or decoding input rather than
    /// from the analysis itself.
    pub fn is_input_error(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Parse { .. })
    }
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        let line = err.position().map(|p| p.line()).unwrap_or(0);
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e),
            kind => Error::parse(line, "<row>", format!("{kind:?}")),
        }
    }
}

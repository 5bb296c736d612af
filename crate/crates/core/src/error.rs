use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: self-loop on node `{node}`")]
    SelfLoop { line: usize, node: String },

    #[error("invalid edge-list format `{0}`: {1}")]
    Format(String, &'static str),

    #[error("unknown node {0}")]
    UnknownNode(u32),

    #[error("graph is disconnected; take the giant component first")]
    Disconnected,

    #[error("walk length {0} outside supported range 2..=5")]
    WalkLength(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("all timestamps are identical; a temporal split needs timestamps, use the random split instead")]
    NoTemporalSpread,

    #[error("split produced an empty probe set")]
    EmptyProbe,

    #[error("could not keep the graph connected after examining {budget} candidate edges ({removed} of {wanted} removed)")]
    Connectivity {
        budget: usize,
        removed: usize,
        wanted: usize,
    },

    #[error("the set of nonexistent pairs is empty")]
    EmptyUniverse,

    #[error("exact AUC needs {0} comparisons, above the 10^7 limit; use sampled AUC")]
    ExactAucTooLarge(u128),

    #[error("precision cutoff L={l} invalid for {available} ranked pairs")]
    PrecisionCutoff { l: usize, available: usize },

    #[error("drift iterations {0} exceed the limit of 50")]
    TooManyIterations(u32),

    #[error("{context}: {source}")]
    Cell {
        context: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn in_cell(self, context: impl Into<String>) -> Error {
        Error::Cell {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// True for problems with the input data rather than the run itself.
    pub fn is_data_error(&self) -> bool {
        match self {
            Error::Parse { .. }
            | Error::SelfLoop { .. }
            | Error::Format(..)
            | Error::Disconnected
            | Error::NoTemporalSpread
            | Error::EmptyProbe
            | Error::EmptyUniverse => true,
            Error::Cell { source, .. } => source.is_data_error(),
            _ => false,
        }
    }
}

use std::path::PathBuf;

use crate::outcome::GroupingOutcome;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid move: {0}")]
    InvalidMove(String),

    #[error("{what} not found: {id}")]
    NotFound { what: &'static str, id: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid rating matrix: {0}")]
    InvalidMatrix(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("enumeration budget of {limit} partitions exceeded")]
    BudgetExceeded {
        limit: u64,
        /// Best outcome seen before the budget ran out.
        best: Option<Box<GroupingOutcome>>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate rating for user {user:?}, item {item:?} at line {line}")]
    Duplicate { user: String, item: String, line: usize },

    #[error("rating {value} at line {line} is outside the scale [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64, line: usize },

    #[error("rating matrix is incomplete: {missing} pairs missing, e.g. {examples}")]
    Incomplete { missing: usize, examples: String },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn user_not_found(user: usize) -> Self {
        Error::NotFound { what: "user", id: user.to_string() }
    }

    pub(crate) fn item_not_found(item: usize) -> Self {
        Error::NotFound { what: "item", id: item.to_string() }
    }
}

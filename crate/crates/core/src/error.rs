use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or search cap was hit before an answer was reached.
    /// This is never a mathematical "no".
    #[error("budget exceeded: {what} (cap {cap})")]
    Budget { what: &'static str, cap: u64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("degree mismatch: expected {expected}, found {found}")]
    DegreeMismatch { expected: usize, found: usize },

    #[error("the trivial group has no maximal proper subgroup")]
    TrivialGroup,

    #[error("not a subgroup of the given group")]
    NotSubgroup,

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("invalid structure: {0}")]
    InvalidStructure(String),

    #[error("invalid condition: {0}")]
    InvalidCondition(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget { .. })
    }
}

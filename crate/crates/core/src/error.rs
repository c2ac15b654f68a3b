use num_bigint::BigInt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DraftError {
    #[error("agent {agent:?} has {got} efficiencies, expected {expected}")]
    DimensionMismatch {
        agent: String,
        expected: usize,
        got: usize,
    },
    #[error("duplicate agent id {0:?}")]
    DuplicateId(String),
    #[error("unknown agent id {0:?}")]
    UnknownAgent(String),
    #[error("invalid position: {0}")]
    InvalidPosition(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{at}: {msg}")]
    Parse { at: String, msg: String },
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("node budget of {budget} exceeded; value lies in [{lower}, {upper}]")]
    BudgetExceeded {
        budget: u64,
        lower: BigInt,
        upper: BigInt,
    },
}

impl DraftError {
    pub(crate) fn parse(at: impl Into<String>, msg: impl Into<String>) -> Self {
        DraftError::Parse {
            at: at.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T, E = DraftError> = std::result::Result<T, E>;

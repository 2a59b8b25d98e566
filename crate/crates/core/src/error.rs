use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BoostError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid state: {0}")]
    InvalidState(String),
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// The estimator broke its relative-error guarantee; the update left the
    /// admissible weight-sum interval.
    #[error("estimator contract violated in round {round}: weight sum {sum} outside [{lower}, {upper}]")]
    ContractViolation {
        round: usize,
        sum: f64,
        lower: f64,
        upper: f64,
    },
    #[error("incomplete run record: {0}")]
    IncompleteRecord(String),
    #[error("record format: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, BoostError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(BoostError::InvalidArgument(msg.into()))
}

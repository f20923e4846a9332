use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid policy: {0}")]
    InvalidPolicy(String),

    #[error("state {state} is terminal (goal {goal})")]
    TerminalState { state: usize, goal: usize },

    #[error("round exceeded the step cap of {cap} steps")]
    StepCapExceeded { cap: u64 },

    #[error("policy enumeration limited to goal <= {max}, got {goal}")]
    EnumerationTooLarge { goal: usize, max: usize },

    #[error("estimate undefined: {0} counter is zero")]
    EmptyCounter(&'static str),

    #[error("invalid experiment configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown algorithm `{0}`")]
    UnknownAlgorithm(String),

    #[error("snapshot error: {0}")]
    Snapshot(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

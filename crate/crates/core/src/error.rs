use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {0} is out of range")]
    InvalidVertex(usize),

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("parallel arc {0} -> {1}")]
    ParallelArc(usize, usize),

    #[error("rotation system is inconsistent with the edge set: {0}")]
    InconsistentRotation(String),

    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),

    #[error("wrong phase: expected {expected}, found {found}")]
    WrongPhase { expected: &'static str, found: String },

    #[error("expected {expected} cop positions, got {got}")]
    WrongCopCount { expected: usize, got: usize },

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("game configuration is invalid: {0}")]
    InvalidConfig(String),

    #[error("region is not connected")]
    Disconnected,

    #[error("solver state space of {states} states exceeds budget {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("initial position is not a cop win")]
    NotCopWin,

    #[error("cop budget exhausted: needed {needed}, have {available}")]
    CopBudgetExhausted { needed: usize, available: usize },

    #[error("strategy error: {0}")]
    Strategy(String),

    #[error("lemma verifier misconfigured: {0}")]
    Horizon(String),

    #[error("malformed document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

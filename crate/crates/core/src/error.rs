use thiserror::Error;

/// Errors surfaced by the odometer, circle, flow, and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("no zero block found within the first {limit} blocks")]
    SearchLimitExceeded { limit: usize },

    #[error("value {value} does not fit in a bit word of width {width}")]
    OutOfRange { value: String, width: u32 },

    #[error("cocycle index {index} out of range at level {level} (valid range 0..={max})")]
    IndexOutOfRange {
        level: u32,
        index: String,
        max: String,
    },

    #[error("cannot take a closed-form power of a mixed chain; compose iteratively instead")]
    UnsupportedChain,

    #[error("direct-iteration budget exceeded: {requested} steps > {budget}")]
    BudgetExceeded { requested: String, budget: u64 },

    #[error("burst count s={s} outside the valid range 1..2^{block_width} at level {level}")]
    SOutOfRange {
        s: String,
        level: u32,
        block_width: u32,
    },

    #[error("condition {condition} violated at level {level}: {detail}")]
    ValidationFailure {
        condition: &'static str,
        level: u32,
        detail: String,
    },

    #[error("almost-periodic configuration broken at time {time}: deviation {deviation}")]
    ConfigurationBroken { time: String, deviation: f64 },

    #[error("invalid block schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid cocycle family: {0}")]
    InvalidFamily(String),

    #[error("invalid odometer point literal {literal:?}: {reason}")]
    InvalidPointLiteral { literal: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

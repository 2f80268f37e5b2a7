use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown variable `{name}` at byte {offset}")]
    UnknownVariable { name: String, offset: usize },

    #[error("exponent at byte {offset} exceeds the cap {cap}")]
    ExponentOverflow { offset: usize, cap: u32 },

    #[error("arity mismatch: expected {expected}, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("invalid weights: {0}")]
    InvalidWeights(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("pattern not matched: {0}")]
    PatternUnmet(String),

    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit status for the command-line tool: 1 for bad input,
    /// 2 when no conclusion was reached, 3 for internal invariant failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Syntax { .. }
            | Error::UnknownVariable { .. }
            | Error::ExponentOverflow { .. }
            | Error::Arity { .. }
            | Error::InvalidWeights(_) => 1,
            Error::Budget(_) | Error::Inconclusive(_) | Error::NotApplicable(_) | Error::PatternUnmet(_) => 2,
            Error::Invariant(_) => 3,
        }
    }

    /// Short machine name of the error kind.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Syntax { .. } => "syntax",
            Error::UnknownVariable { .. } => "unknown_variable",
            Error::ExponentOverflow { .. } => "exponent_overflow",
            Error::Arity { .. } => "arity",
            Error::InvalidWeights(_) => "invalid_weights",
            Error::Budget(_) => "budget",
            Error::Inconclusive(_) => "inconclusive",
            Error::NotApplicable(_) => "not_applicable",
            Error::PatternUnmet(_) => "pattern_unmet",
            Error::Invariant(_) => "invariant",
        }
    }

    pub fn syntax(offset: usize, message: impl Into<String>) -> Self {
        Error::Syntax { offset, message: message.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

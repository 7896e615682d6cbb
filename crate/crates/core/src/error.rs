use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported field order {0}: expected an odd prime between 3 and 31")]
    UnsupportedField(u32),

    #[error("field mismatch: GF({left}) vs GF({right})")]
    FieldMismatch { left: u32, right: u32 },

    #[error("division by zero")]
    DivisionByZero,

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("entry {value} out of range for GF({p})")]
    EntryOutOfRange { value: i64, p: u8 },

    #[error("{what}: enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { what: String, needed: u128, budget: u64 },

    /// Exhaustive lower-rank scan would exceed the budget; `upper_bound` is
    /// the smallest rank seen among the members that were sampled.
    #[error("lower rank scan of {points} points exceeds budget {budget}; sampled upper bound {upper_bound}")]
    LrkBudgetExceeded { points: u128, budget: u64, upper_bound: usize },

    /// A witness search stopped before it was exhaustive.
    #[error("{what}: search inconclusive after {spent} steps (budget {budget})")]
    Inconclusive { what: String, spent: u64, budget: u64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("not extremal: {0}")]
    NotExtremal(String),

    /// Something a theorem rules out was observed. Carries a reproducible dump.
    #[error("theorem falsified ({statement}): {dump}")]
    TheoremFalsified { statement: String, dump: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn budget(what: impl Into<String>, needed: u128, budget: u64) -> Error {
        Error::BudgetExceeded { what: what.into(), needed, budget }
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Error {
        Error::ShapeMismatch(msg.into())
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::UnsupportedField(_) => "unsupported_field",
            Error::FieldMismatch { .. } => "field_mismatch",
            Error::DivisionByZero => "division_by_zero",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::SingularMatrix => "singular_matrix",
            Error::EntryOutOfRange { .. } => "entry_out_of_range",
            Error::BudgetExceeded { .. } => "budget_exceeded",
            Error::LrkBudgetExceeded { .. } => "lrk_budget_exceeded",
            Error::Inconclusive { .. } => "inconclusive",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::InvalidInput(_) => "invalid_input",
            Error::NotExtremal(_) => "not_extremal",
            Error::TheoremFalsified { .. } => "theorem_falsified",
            Error::Json(_) => "json",
        }
    }
}

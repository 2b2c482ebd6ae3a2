use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("prime fields only: GF({0}) is not supported (expected 2, 3, 5 or 7)")]
    UnsupportedField(u32),

    #[error("dimension mismatch: {0}")]
    Shape(String),

    #[error("ambient mismatch: {0}")]
    Ambient(String),

    #[error("field mismatch: GF({0}) vs GF({1})")]
    FieldMismatch(u8, u8),

    #[error("matrix is singular")]
    Singular,

    #[error("enumeration of {needed} items exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("linear system has no solution")]
    NoSolution,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("subspace has codimension {0}, at least 2 required")]
    CodimTooSmall(usize),

    #[error("invalid campaign: {0}")]
    InvalidCampaign(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    pub(crate) fn budget(needed: u128, budget: u64) -> Self {
        Error::BudgetExceeded { needed, budget }
    }
}

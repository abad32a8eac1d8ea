use thiserror::Error;

/// Everything that can go wrong short of a bug; bugs panic.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed or out-of-domain parameters (non-coprime bases, zero denominator, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Structurally valid input that violates an operation's precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A configured element or size budget would be exceeded.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// A certified comparison stayed undecided at the highest working precision.
    #[error("undecided at {bits} bits of working precision: {context}")]
    Precision { bits: u32, context: String },

    /// Inputs that are individually fine but mutually inconsistent.
    #[error("inconsistent inputs: {0}")]
    Inconsistent(String),

    /// Failed to parse a spec (real-number JSON, point file, config).
    #[error("parse error: {0}")]
    Parse(String),

    /// A postcondition this crate guarantees failed to hold; indicates a bug.
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParams(_) => "invalid_params",
            Error::Precondition(_) => "precondition",
            Error::Budget(_) => "budget",
            Error::Precision { .. } => "precision",
            Error::Inconsistent(_) => "inconsistent",
            Error::Parse(_) => "parse",
            Error::Internal(_) => "internal",
        }
    }
}

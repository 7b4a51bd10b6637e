use thiserror::Error;

/// Errors produced by the library.
///
/// The CLI maps these onto its exit-code contract: usage errors exit 1,
/// domain errors exit 2, precision/budget exhaustion exits 3.
#[derive(Debug, Error)]
pub enum QdError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("zero vector not allowed here")]
    ZeroVector,

    #[error("negative radicand in interval sqrt")]
    NegativeRadicand,

    #[error("division by an interval containing zero")]
    DivisorContainsZero,

    #[error("logarithm of an interval not certified positive")]
    LogNotPositive,

    #[error("place must be a prime or `inf`: {0}")]
    InvalidPlace(String),

    #[error("matrix is singular")]
    SingularMatrix,

    #[error("isotropic witness search exhausted (cap {cap} points)")]
    SearchExhausted { cap: u64 },

    #[error("cannot factor {0}; refusing to guess local conditions")]
    FactorizationNeeded(String),

    #[error("the hypersurface has no point with linearly independent coordinates")]
    NoLiPoint,

    #[error("seed check failed: {0}")]
    SeedCheckFailed(String),

    #[error("digit budget exceeded: need at least {needed} decimal digits, budget {budget}")]
    DigitBudgetExceeded { needed: u64, budget: u64 },

    #[error("interval precision exhausted at {bits} bits: {context}")]
    PrecisionExhausted { bits: u32, context: String },

    #[error("sequence tail is not contracting; extend the sequence")]
    TailNotContracting,

    #[error("insufficient data: need {needed}, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid input: {0}")]
    BadInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QdError>;

impl QdError {
    /// Exit code class for the CLI: 1 usage, 2 domain, 3 precision/budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            QdError::BadInput(_) | QdError::Json(_) | QdError::Io(_) => 1,
            QdError::PrecisionExhausted { .. } | QdError::DigitBudgetExceeded { .. } => 3,
            _ => 2,
        }
    }
}

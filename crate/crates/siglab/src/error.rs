use thiserror::Error;

/// Errors surfaced by the siglab library.
#[derive(Debug, Error)]
pub enum SigLabError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("path is invalid: {0}")]
    InvalidPath(String),

    #[error("correlation target is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    #[error("degenerate predictor column for word {word}: {reason}")]
    DegenerateColumn { word: String, reason: String },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("active block of the correlation matrix is singular: {0}")]
    SingularActiveBlock(String),

    #[error("mixed-parity word pair ({0}, {1}): cross-parity second moments vanish")]
    MixedParity(String, String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("conditioning event is empty: no draw satisfied the norm ball; increase theta")]
    EmptyConditioningEvent,

    #[error("rank-deficient regression: {0}")]
    RankDeficient(String),

    #[error("{0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, SigLabError>;

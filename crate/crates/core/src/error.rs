use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed system document: {0}")]
    Malformed(String),
    #[error("level {level}: base must be at least 2 (got {base})")]
    BaseTooSmall { level: usize, base: u64 },
    #[error("level {level}: digit count must be at least 1")]
    CountTooSmall { level: usize },
    #[error("level {level}: scale must be at least 1")]
    ScaleTooSmall { level: usize },
    #[error("system has no level with at least two digits")]
    TrivialSystem,
    #[error("empty prefix requires a tail rule")]
    EmptySystem,
    #[error("level {0} is beyond the finite horizon of the system")]
    BeyondHorizon(usize),
    #[error("level {0}: digit count does not fit in 64 bits")]
    LevelOverflow(usize),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("zero is never in a zero set")]
    ZeroFrequency,
    #[error("requested precision {0:e} is below the rounding floor")]
    PrecisionUnreachable(f64),
    #[error("not spectral: N_{0} does not divide b_{0}")]
    NotSpectral(usize),
    #[error("candidate set must contain 0")]
    MissingZero,
    #[error("candidate set is not a spectrum of the window")]
    NotASpectrum,
    #[error("construction failed verification: {0}")]
    VerificationFailed(String),
    #[error("vertex budget exceeded: at least {needed} vertices, budget {budget}")]
    BudgetExceeded { needed: usize, budget: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

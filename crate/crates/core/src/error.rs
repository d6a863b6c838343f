use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("coefficient for frequency {frequency} is zero")]
    ZeroCoefficient { frequency: f64 },

    #[error("frequency {frequency} appears more than once")]
    DuplicateFrequency { frequency: f64 },

    #[error("invalid sample grid [{start}, {end}]: start must be below end")]
    InvalidGrid { start: i64, end: i64 },

    #[error("threshold must be positive, got {0}")]
    InvalidThreshold(f64),

    #[error("frequency {frequency} has {candidates} candidates within threshold {threshold}")]
    AmbiguousMatch {
        frequency: f64,
        candidates: usize,
        threshold: f64,
    },

    #[error("argument {value} outside the domain of {operation}")]
    Domain { operation: &'static str, value: f64 },

    #[error("separation {separation} is below the required {required}")]
    SeparationViolated { separation: f64, required: f64 },

    #[error("partition threshold {found} does not match the required {required}")]
    ThresholdMismatch { found: f64, required: f64 },

    #[error("{count} frequencies are left unmatched")]
    UnmatchedFrequencies { count: usize },

    #[error("model assumption violated: {0}")]
    ModelViolation(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("Hankel matrix is rank deficient: sigma_{order} = {sigma_m:e}, sigma_1 = {sigma_1:e}")]
    RankDeficient {
        order: usize,
        sigma_m: f64,
        sigma_1: f64,
    },

    #[error("serialization failed: {0}")]
    Serialization(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

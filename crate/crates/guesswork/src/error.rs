use thiserror::Error;

/// Errors produced by model construction and the estimators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input")]
    EmptyInput,

    #[error("non-positive probability at position {index}: {value}")]
    NonPositiveProbability { index: usize, value: f64 },

    #[error("probabilities sum to {sum}, more than 1e-6 away from 1 (pass weights through a normalizing loader instead)")]
    NotNormalized { sum: f64 },

    #[error("negative entry at row {row}, column {col}")]
    NegativeCount { row: usize, col: usize },

    #[error("ragged row {row}: expected {expected} columns, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row {row} has no positive entry (dead-end symbol)")]
    ZeroRow { row: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("failed to parse {what}: {detail}")]
    Parse { what: &'static str, detail: String },

    #[error("stationary solve did not converge (chain may be reducible or periodic)")]
    StationaryNonConvergence,

    #[error("order-2 entropy requires a Markov source")]
    OrderRequiresMarkov,

    #[error("enumeration requires {required} products, above the cap of {cap}; use an estimator instead")]
    EnumerationCapExceeded { required: f64, cap: f64 },

    #[error("histogram backend {backend} does not apply to this model order")]
    BackendMismatch { backend: &'static str },

    #[error("histogram contains no nonzero bin")]
    EmptyHistogram,

    #[error("bin counts would exceed the floating-point range (m*ln(n) = {log_total:.1}); use the sampling estimator")]
    CountOverflow { log_total: f64 },

    #[error("sigma1 = 0: the normal model is degenerate (uniform distribution)")]
    SigmaZero,

    #[error("word length m must be at least 1")]
    ZeroLength,

    #[error("asymptotic condition mu1/(sigma1*sqrt(2)) > sigma1/2 violated; leading term invalid")]
    AsymptoticInvalid,

    #[error("closed-form bracket is non-positive at m = {m}; outside the formula's domain")]
    ClosedFormDomain { m: u32 },

    #[error("every sampled word had probability zero; cannot estimate moments")]
    AllZeroSamples,

    #[error("need at least {needed} points inside the fit range, found {found}")]
    InsufficientPoints { needed: usize, found: usize },

    #[error("replicate count must be at least 2 to form a confidence interval")]
    TooFewReplicates,
}

pub type Result<T> = std::result::Result<T, Error>;

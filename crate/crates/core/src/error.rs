use thiserror::Error;

/// Errors raised by operator construction, iteration engines, rate formulas
/// and trace diagnostics.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not monotone: smallest eigenvalue of the symmetric part is {min_eigenvalue:e}")]
    NotMonotone { min_eigenvalue: f64 },

    #[error("invalid operator description: {0}")]
    InvalidSpec(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("resolvent linear system is numerically singular (gamma = {gamma})")]
    SolveFailure { gamma: f64 },

    #[error("no zero-set information available for this operator")]
    NoZeroSetInfo,

    #[error("relative-error policy requires eta*eps < 1, got eta = {eta}, eps = {eps}")]
    PolicyViolation { eta: f64, eps: f64 },

    #[error("value out of range: {0}")]
    RangeViolation(String),

    #[error("iterate diverged at k = {k}: norm {norm:e} exceeds 1e12")]
    Diverged { k: usize, norm: f64 },

    #[error("domain error: {0}")]
    DomainError(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("certificate is not contractive: mu = {mu}")]
    NonContractive { mu: f64 },

    #[error("point is not a zero of the operator (resolvent residual {residual:e})")]
    NotAZero { residual: f64 },

    #[error("zero set is not a singleton")]
    ZeroSetNotSingleton,

    #[error("metric {0} is not available on this trace")]
    MetricUnavailable(&'static str),

    #[error("certificate metric {certificate} does not match requested metric {requested}")]
    MetricMismatch {
        certificate: &'static str,
        requested: &'static str,
    },

    #[error("trace too short: need at least {need} usable entries, got {got}")]
    TooShort { need: usize, got: usize },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code: 2 for invalid input, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. }
            | Error::InvalidSpec(_)
            | Error::Io(_)
            | Error::RangeViolation(_)
            | Error::DomainError(_)
            | Error::PolicyViolation { .. }
            | Error::DimensionMismatch { .. }
            | Error::HypothesisViolation(_)
            | Error::NotAZero { .. } => 2,
            _ => 4,
        }
    }

    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |h - h^dagger| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("derivative is not traceless (|tr| = {trace:.3e})")]
    NotTraceless { trace: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector length {0} is not a perfect square")]
    NotSquareLength(usize),

    #[error("numerical overflow: {0}")]
    NumericalOverflow(String),

    #[error("tolerance not met: {0}")]
    ToleranceNotMet(String),

    #[error("logarithmic derivative of the parameter profile vanishes")]
    ZeroLogDerivative,

    #[error("state is singular (lambda_min = {lambda_min:.3e}); upper bound unavailable")]
    SingularState { lambda_min: f64 },

    #[error("information must be positive, got {0}")]
    NonpositiveInformation(f64),

    #[error("outside the domain: {0}")]
    DomainError(String),

    #[error("dimension limit exceeded: {0}")]
    DimensionLimit(String),

    #[error("unsupported body order k = {0} (only odd k is handled)")]
    UnsupportedOrder(usize),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid rate profile: {0}")]
    InvalidProfile(String),

    #[error("non-finite entry in matrix")]
    NonFinite,

    #[error("config error{}: {message}", field.as_ref().map(|f| format!(" in `{f}`")).unwrap_or_default())]
    Config {
        field: Option<String>,
        message: String,
    },
}

impl Error {
    pub fn config(message: impl Into<String>) -> Self {
        Error::Config {
            field: None,
            message: message.into(),
        }
    }

    pub fn config_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: Some(field.into()),
            message: message.into(),
        }
    }
}

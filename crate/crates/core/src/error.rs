use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum HardyError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The Hardy coefficient exceeds the Hardy constant of the cone, so no
    /// nonnegative nontrivial supersolution exists.
    #[error("nonexistence regime: c = {c} exceeds the Hardy constant mu = {mu}; no nonnegative nontrivial supersolution exists")]
    AboveHardyConstant { c: f64, mu: f64 },
    /// A bisection bracket could not be established.
    #[error("search error: {0}")]
    Search(String),
    /// An iteration did not converge within its budget.
    #[error("convergence error: {0}")]
    Convergence(String),
    /// The discrete quadratic form is not positive definite.
    #[error("coercivity error: {0}")]
    Coercivity(String),
    /// A hypothesis of the routine is violated.
    #[error("precondition error: {0}")]
    Precondition(String),
    /// Evaluation at a point where a closed-form term is singular.
    #[error("singular point: {0}")]
    SingularPoint(String),
    /// Malformed grid or mass matrix.
    #[error("grid error: {0}")]
    Grid(String),
    /// A regression did not meet its quality gate.
    #[error("fit error: {0}")]
    Fit(String),
    /// Invalid user configuration.
    #[error("config error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, HardyError>;

impl From<std::io::Error> for HardyError {
    fn from(e: std::io::Error) -> Self {
        HardyError::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HardyError::Domain(msg.into()))
}

use std::fmt;

/// Failures raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("log-gamma pole at z = {0}")]
    Pole(f64),
    #[error("step size underflow at r = {r:e}")]
    StepUnderflow { r: f64 },
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("lambda = {lambda} lies outside the spectral window [{lo}, {hi}]")]
    OutOfWindow { lambda: f64, lo: f64, hi: f64 },
    #[error("singular profile: {0}")]
    SingularProfile(String),
    #[error("unsupported root configuration: {0}")]
    UnsupportedRoots(String),
    #[error("theta is not monotone: {0}")]
    NonMonotone(String),
    #[error("support budget infeasible: lengths sum to {needed}, budget is {budget}")]
    BudgetInfeasible { needed: f64, budget: f64 },
    #[error("spectral window too small: tail mass {tail:e} exceeds {limit:e}")]
    WindowTooSmall { tail: f64, limit: f64 },
    #[error("ill-posed input: {0}")]
    IllPosed(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal conditions attached to results.
#[derive(Debug, Clone, PartialEq)]
pub enum Warning {
    /// Integrand tail at the truncation point is not negligible.
    Truncation { relative_tail: f64, at: f64 },
    /// Finite-difference residual on a known eigenfunction is above 1e-4.
    GridTooCoarse { residual: f64 },
    /// Log-magnitude exceeded the representable budget.
    Overflow { log_value: f64 },
    /// c-function evaluated at its removable point.
    LimitingValue { lambda: f64 },
}

impl fmt::Display for Warning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Warning::Truncation { relative_tail, at } => {
                write!(f, "truncation: relative tail {relative_tail:.3e} at {at}")
            }
            Warning::GridTooCoarse { residual } => {
                write!(f, "grid too coarse: eigen-residual {residual:.3e}")
            }
            Warning::Overflow { log_value } => write!(f, "overflow: log-magnitude {log_value:.3e}"),
            Warning::LimitingValue { lambda } => write!(f, "limiting value used at lambda = {lambda}"),
        }
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

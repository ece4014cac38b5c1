use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A physical parameter is outside its allowed domain.
    #[error("parameter domain error: {0}")]
    Domain(String),

    #[error("cannot parse `{token}`: {reason}")]
    Parse { token: String, reason: String },

    #[error("invalid time grid: {0}")]
    Grid(String),

    #[error("invalid input: {0}")]
    Input(String),

    /// The step-halving loop hit its cap before the self-consistency target.
    #[error("integration did not converge: achieved {achieved:e}, target {target:e}")]
    Integration { achieved: f64, target: f64 },

    /// Eigenvalues collided (exceptional point or zero coupling).
    #[error("degenerate eigensystem: {0}")]
    Degenerate(String),

    #[error("time {t} outside series range [{start}, {end}]")]
    Range { t: f64, start: f64, end: f64 },

    /// The latency predictor has no transfer to report (g = 0 or δ ≥ θ).
    #[error("no transfer: {0}")]
    NoTransfer(String),
}

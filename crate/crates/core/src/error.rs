use thiserror::Error;

/// Errors raised by the analytic formulas, the simulator and the optimizers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{func}: argument outside the domain ({detail})")]
    Domain { func: &'static str, detail: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (estimate {estimate:e}, error {abs_error:e})"
    )]
    NonConvergence { subdivisions: usize, estimate: f64, abs_error: f64 },

    #[error("integrand returned a non-finite value at x = {x:e}")]
    NonFiniteIntegrand { x: f64 },

    #[error("objective returned a non-finite value at alpha = {alpha}")]
    NonFiniteObjective { alpha: f64 },

    #[error("probability {value} lies outside [0, 1] beyond round-off")]
    ProbabilityExcursion { value: f64 },

    #[error("{0} has no analytic formulas; use the Monte Carlo path")]
    MonteCarloOnly(&'static str),

    #[error("per-draw optimization failed on {failed} of {trials} draws")]
    OptimizerFailures { failed: u64, trials: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Error {
    Error::Domain { func, detail: detail.into() }
}

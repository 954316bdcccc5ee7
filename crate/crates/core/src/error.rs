use thiserror::Error;

/// Errors raised by the numerical kernels and the sweep harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument {value} outside supported range [{min}, {max}] for {what}")]
    Range {
        what: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("argument {value} outside the domain of {what}: {reason}")]
    Domain {
        what: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("internal consistency check failed for {what}: {detail}")]
    Consistency { what: &'static str, detail: String },

    #[error("model assumption violated: {0}")]
    Misuse(String),

    #[error("ODE step size underflow at s = {s:.6e} (step {step:.3e})")]
    Stiffness { s: f64, step: f64 },

    #[error("solution basis lost rank at s = {s:.6e} (residual ratio {ratio:.3e})")]
    DegenerateBasis { s: f64, ratio: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NoConvergence { what: &'static str, iterations: usize },

    #[error("winding count inconclusive: a zero lies near the boundary point rho = {re:.6e}{im:+.6e}i")]
    InconclusiveCount { re: f64, im: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {message}")]
    Io { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

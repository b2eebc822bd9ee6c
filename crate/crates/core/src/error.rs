use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("alpha must be > -1, got {0}")]
    AlphaOutOfRange(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:e})")]
    JacobiNoConvergence { sweeps: usize, off: f64 },

    #[error("matrix of order {n} exceeds the limit {limit} for this operation")]
    SizeGuard { n: usize, limit: usize },

    #[error("no sign change of J_{nu}(x) found below x = {limit}")]
    NoBesselZero { nu: f64, limit: f64 },

    #[error("no root in bracket [{lo}, {hi}]")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("adaptive integration failed to reach tolerance {tol:e} on [{a}, {b}]")]
    Integration { a: f64, b: f64, tol: f64 },

    #[error("zero polynomial has no Rayleigh quotient")]
    ZeroPolynomial,

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unknown bound id `{0}`")]
    UnknownBound(String),

    #[error("output error: {0}")]
    Output(String),
}

impl Error {
    /// True for failures of a numerical procedure, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NoConvergence { .. }
                | Error::JacobiNoConvergence { .. }
                | Error::NoBesselZero { .. }
                | Error::NoRootInBracket { .. }
                | Error::Integration { .. }
                | Error::ZeroPolynomial
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Output(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Output(e.to_string())
    }
}

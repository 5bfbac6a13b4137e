use thiserror::Error;

/// Errors raised by the numerical and sampling routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {what} = {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    /// A routine could not certify its requested accuracy.
    #[error("accuracy target missed: estimated error {est_error:e} exceeds tolerance {tol:e}")]
    Accuracy { est_error: f64, tol: f64 },

    #[error("{what} = {value} exceeds the supported maximum {max}")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },

    #[error("truncation rank exceeded the hard cap of {cap}")]
    TruncationCap { cap: usize },

    #[error("finite matrix size required")]
    InfiniteSize,

    #[error("eigenvalue iteration failed to converge for a {dim}x{dim} matrix (seed {seed:?}, draw {draw:?})")]
    EigenFailure {
        dim: usize,
        seed: Option<u64>,
        draw: Option<u64>,
    },

    #[error("sample must be nonempty")]
    EmptySample,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_positive(what: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

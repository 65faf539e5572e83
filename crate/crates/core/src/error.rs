use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Argument outside the domain of the routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size cap (moments, matrix entries, coefficients) would be exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A numerical integral did not reach the requested tolerance.
    #[error("quadrature did not reach tolerance {tolerance:e}: value {partial} (estimated error {estimated_error:e})")]
    Quadrature {
        partial: f64,
        estimated_error: f64,
        tolerance: f64,
    },

    /// An iterative method stopped before converging.
    #[error("{0} did not converge")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

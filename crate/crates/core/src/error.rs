use thiserror::Error;

/// Errors raised by the set-valued recovery toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("direction grids differ")]
    GridMismatch,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{what}: expected {expected} items, got {found}")]
    CountMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("argument {value} outside of domain {domain}")]
    OutOfDomain { value: f64, domain: String },

    #[error("modulus is not strictly increasing (witness {lo} < {hi} with equal values); noisy-information routines require a strictly increasing modulus")]
    NotStrictlyIncreasing { lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    QuadratureNonconvergence { tol: f64, estimate: f64 },

    #[error("refinement stopped at {cells} cells with successive distance {distance:e} > {target:e}")]
    IntegrationNonconvergence {
        cells: usize,
        distance: f64,
        target: f64,
        /// Support values of the finest iterate.
        best: Vec<f64>,
    },

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for failures of an iterative numerical procedure.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNonconvergence { .. } | Error::IntegrationNonconvergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

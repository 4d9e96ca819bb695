use thiserror::Error;

/// Failures reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("representation label must be nonzero")]
    ZeroSigma,
    #[error("basis mismatch: left has N_max={left}, right has N_max={right}")]
    BasisMismatch { left: usize, right: usize },
    #[error("invalid axis index {0}")]
    InvalidAxis(usize),
    #[error("non-finite value for {0}")]
    NonFinite(&'static str),
    #[error("matrix is not in O(1,3): defect {defect:e}")]
    NotLorentz { defect: f64 },
    #[error("generator must be a pure polynomial (no exponential factor)")]
    NonPolynomialGenerator,
    #[error("series did not converge: residual {residual:e} after {terms} terms")]
    SeriesNotConverged { residual: f64, terms: usize },
    #[error("rho cutoff {0} outside [0, 1)")]
    RhoCutOutOfRange(f64),
    #[error("integrand overflow during quadrature")]
    IntegrandOverflow,
    #[error("integral diverges: partial integrals grew by {growth:e} at cutoff {cutoff}")]
    Divergent { cutoff: f64, growth: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

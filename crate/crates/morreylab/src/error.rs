//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Integration region has no lattice nodes inside the domain.
    #[error("empty region: {0}")]
    EmptyRegion(String),

    /// A ball required to stay inside the domain exits it.
    #[error("balls exit domain: {0}")]
    BallOutsideDomain(String),

    /// Two fields live on incompatible grids.
    #[error("grids mismatch: {0}")]
    GridMismatch(String),

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A theorem hypothesis fails; the message names the failing inequality.
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    /// A log-log fit received a profile it cannot use (zeros, too few points).
    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    /// Non-finite field values outside of declared singular handling.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The iterative solver hit its iteration budget.
    #[error("solver did not converge: residual {residual:.3e} after {iterations} iterations")]
    NotConverged { residual: f64, iterations: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

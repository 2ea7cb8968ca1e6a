use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("integer overflow: convergents valid up to index {largest_valid}")]
    IntegerOverflow { largest_valid: usize },

    #[error("combinatorics mismatch at level {level}: {detail}")]
    CombinatoricsMismatch { level: usize, detail: String },

    #[error("bisection stalled: combinatorics matched only through level {deepest_matched}")]
    BisectionStall { deepest_matched: usize },

    #[error("evaluation within {distance:e} of a Moebius pole")]
    PoleProximity { distance: f64 },

    #[error("seam residual {residual:e} exceeds tolerance")]
    SeamDiscontinuity { residual: f64 },

    #[error("root finding failed: {0}")]
    RootFindFailure(String),

    #[error("point leaves the band |Im z| < {band}")]
    BandExceeded { band: f64 },

    #[error("planar Newton diverged: {0}")]
    NewtonDivergence(String),

    #[error("kernel evaluated at a pole")]
    PoleHit,

    #[error("quadrature did not converge: {coarse:e} vs {fine:e}")]
    QuadratureNonconvergence { coarse: f64, fine: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

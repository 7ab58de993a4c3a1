use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("grid size must be even and at least 4, got {0}")]
    InvalidGrid(usize),

    #[error("fields live on different grids (N={left} vs N={right})")]
    GridMismatch { left: usize, right: usize },

    #[error("expected {expected} samples, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite sample at index {0}")]
    NonFinite(usize),

    #[error("field has nonzero mean {0:e}; call reduce_mean first")]
    NonZeroMean(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("T/tau is not an integer (T={t_final}, tau={tau})")]
    NonIntegerStepCount { t_final: f64, tau: f64 },

    #[error("Newton iteration did not converge at x={point} (residual {residual:e} after {iterations} iterations)")]
    NewtonDiverged {
        point: f64,
        residual: f64,
        iterations: usize,
    },

    #[error("characteristics cross near x={point} (1 - tau*u' = {slope:e})")]
    CharacteristicCrossing { point: f64, slope: f64 },

    #[error("oracle cost guard: N={n} exceeds {limit} (enable the override to proceed)")]
    OracleSizeGuard { n: usize, limit: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("step {step} (tau={tau}) failed: {source}")]
    Step {
        step: usize,
        tau: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    /// The innermost error, with step context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures caused by the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::NewtonDiverged { .. } | Error::CharacteristicCrossing { .. } | Error::NonFinite(_)
        )
    }
}

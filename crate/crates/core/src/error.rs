use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function or constructor.
    #[error("{what}: argument {value} outside domain ({expected})")]
    Domain {
        what: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StepSize { dt: f64, limit: f64 },

    #[error("propagator diverged: |u| = {magnitude} at t = {t}")]
    Divergence { t: f64, magnitude: f64 },

    #[error("quadrature did not reach tolerance: value {value}, error estimate {error} after {intervals} intervals")]
    QuadratureBudget {
        value: f64,
        error: f64,
        intervals: usize,
    },

    #[error("no bound state for these reservoir parameters")]
    NoBoundState,

    #[error("no sign change of {what} on [{lo}, {hi}]")]
    NoSignChange { what: &'static str, lo: f64, hi: f64 },

    #[error("characteristic roots nearly coincide (separation {separation:e})")]
    DegenerateRoots { separation: f64 },

    /// The pseudo-inverse of the QFI metric discarded a direction that the
    /// covariance derivative actually populates.
    #[error("QFI metric ill-conditioned: discarded component carries {weight:e} of vec(dσ)")]
    IllConditioned { weight: f64 },

    #[error("measurement insensitive: signal derivative {denominator:e} below threshold")]
    DivergentPrecision { denominator: f64 },

    #[error("finite-difference derivative unstable: step and half-step disagree by {relative:e}")]
    RichardsonMismatch { relative: f64 },

    #[error("linear algebra failure: {0}")]
    Linalg(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, value: f64, expected: &'static str) -> Self {
        Error::Domain {
            what,
            value,
            expected,
        }
    }

    /// True when the error stems from user input rather than numerics.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. } | Error::InvalidParameter(_) | Error::StepSize { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument outside the domain of {what}: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("pole of the gamma function at {0}")]
    Pole(f64),

    #[error("hypergeometric series did not converge within {terms} terms")]
    NonconvergentSeries { terms: usize },

    #[error("analytic continuation is degenerate: a - b = {diff} is (nearly) an integer")]
    DegenerateContinuation { diff: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(&'static str),

    #[error("moment of order {order} does not exist for beta = {beta}")]
    MomentDoesNotExist { order: u32, beta: f64 },

    #[error("beta = {beta} leaves no normalizable polynomial beyond the constant")]
    TooFewPolynomials { beta: f64 },

    #[error("polynomial index {index} exceeds the system size {max}")]
    IndexOutOfSystem { index: usize, max: usize },

    #[error("alpha = {alpha} lies on the excluded even-integer lattice")]
    UnclassifiedParameter { alpha: f64 },

    #[error("step too large: theta * dt = {0} > 0.5")]
    StepTooLarge(f64),

    #[error("spectral representation requires alpha > 2 off the even-integer lattice (alpha = {alpha})")]
    SpectralHypothesisViolated { alpha: f64 },

    #[error("quadrature did not converge (estimated error {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },

    #[error("series for f4 needs alpha*x > beta")]
    OutsideConvergence,

    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    #[error("moment inversion failed: {0}")]
    MomentInversionFailed(&'static str),

    #[error("matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("invalid sample path: {0}")]
    InvalidPath(&'static str),
}

impl Error {
    /// Stable machine-readable code, used by the CLI error envelope.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "DOMAIN",
            Error::Pole(_) => "POLE",
            Error::NonconvergentSeries { .. } => "NONCONVERGENT_SERIES",
            Error::DegenerateContinuation { .. } => "DEGENERATE_CONTINUATION",
            Error::InvalidParams(_) => "INVALID_PARAMS",
            Error::MomentDoesNotExist { .. } => "MOMENT_DOES_NOT_EXIST",
            Error::TooFewPolynomials { .. } => "TOO_FEW_POLYNOMIALS",
            Error::IndexOutOfSystem { .. } => "INDEX_OUT_OF_SYSTEM",
            Error::UnclassifiedParameter { .. } => "UNCLASSIFIED_PARAMETER",
            Error::StepTooLarge(_) => "STEP_TOO_LARGE",
            Error::SpectralHypothesisViolated { .. } => "SPECTRAL_HYPOTHESIS",
            Error::QuadratureNotConverged { .. } => "QUADRATURE_NOT_CONVERGED",
            Error::OutsideConvergence => "OUTSIDE_CONVERGENCE",
            Error::DegenerateSample(_) => "DEGENERATE_SAMPLE",
            Error::MomentInversionFailed(_) => "MOMENT_INVERSION_FAILED",
            Error::NotPositiveDefinite => "NOT_POSITIVE_DEFINITE",
            Error::InvalidPath(_) => "INVALID_PATH",
        }
    }

    /// Whether the error reflects bad input (as opposed to a numerical failure).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::Pole(_)
                | Error::InvalidParams(_)
                | Error::MomentDoesNotExist { .. }
                | Error::TooFewPolynomials { .. }
                | Error::IndexOutOfSystem { .. }
                | Error::UnclassifiedParameter { .. }
                | Error::StepTooLarge(_)
                | Error::SpectralHypothesisViolated { .. }
                | Error::OutsideConvergence
                | Error::DegenerateSample(_)
                | Error::MomentInversionFailed(_)
                | Error::InvalidPath(_)
        )
    }
}

pub type Result<T> = core::result::Result<T, Error>;

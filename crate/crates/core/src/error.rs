//! Error and warning types shared by every solver in the crate.

use thiserror::Error;

/// Errors raised by parameter validation and the numerical kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A physical or numerical parameter failed validation.
    #[error("{name} must be {requirement}")]
    InvalidParameter {
        name: &'static str,
        requirement: &'static str,
    },

    /// Derived scales were requested where they do not exist.
    #[error("derived scales undefined: {0}")]
    ScalesUndefined(&'static str),

    /// Argument outside the mathematical domain of a function.
    #[error("{function}: argument {value} outside domain {domain}")]
    Domain {
        function: &'static str,
        value: f64,
        domain: &'static str,
    },

    /// A model or potential does not fit the supplied parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// A NaN or infinity appeared where a finite number was required.
    #[error("non-finite value in {context} at {location}")]
    NonFinite { context: &'static str, location: f64 },

    /// The ODE integrator ran out of steps.
    #[error("step limit of {max_steps} exhausted at t = {t}")]
    StepLimit { t: f64, max_steps: usize },

    /// The adaptive step collapsed below round-off.
    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    /// A fixed-point or self-consistency loop did not converge.
    #[error("no convergence after {iterations} iterations (last residual {last:e})", last = residuals.last().copied().unwrap_or(f64::NAN))]
    NotConverged {
        iterations: usize,
        residuals: Vec<f64>,
    },

    /// A dispersion or density became non-physical during a solve.
    #[error("non-physical state in {context} at t = {t}: {detail}")]
    NonPhysical {
        context: &'static str,
        t: f64,
        detail: String,
    },

    /// Time stepping lost stability.
    #[error("stability violation at step {step} (t = {t}): {detail}")]
    Unstable { step: usize, t: f64, detail: String },

    /// Grids that must coincide do not.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Non-fatal diagnostics attached to otherwise valid results.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Warning {
    /// Semiclassical logarithmic law evaluated where `2Dt <= lambda_T^2`.
    OutsideSemiclassicalRange { t: f64 },
    /// Density mass deviates from one.
    NormDrift { norm: f64 },
    /// Spectral sum truncated with non-negligible remaining weight.
    TruncatedSpectrum { tail_weight: f64 },
}

impl std::fmt::Display for Warning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Warning::OutsideSemiclassicalRange { t } => {
                write!(f, "semiclassical log law outside its range at t = {t:e}")
            }
            Warning::NormDrift { norm } => write!(f, "density norm {norm} differs from 1"),
            Warning::TruncatedSpectrum { tail_weight } => {
                write!(f, "spectral truncation tail weight {tail_weight:e}")
            }
        }
    }
}

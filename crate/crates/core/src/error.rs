use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid descriptor: {0}")]
    InvalidDescriptor(String),

    #[error("(H2) violated on {side}: sup Gamma = {sup} is not positive")]
    H2Violation { side: String, sup: f64 },

    #[error("invalid scale factor k = {0}; must be a positive integer")]
    InvalidScale(i64),

    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("integration produced a non-finite value at lambda = {lambda}")]
    IntegrationFailure { lambda: f64 },

    #[error("no band edge found in [{lo}, {hi}]")]
    BracketFailure { lo: f64, hi: f64 },

    #[error("lambda = {lambda} is not below the spectrum (discriminant {discriminant} <= 2)")]
    LambdaInSpectrum { lambda: f64, discriminant: f64 },

    #[error("periodic part of a Bloch mode changes sign at lambda = {lambda}")]
    PositivityFailure { lambda: f64 },

    #[error("state cannot be projected onto the Nehari manifold: int Gamma |u|^(p+1) = {mass}")]
    NonprojectableState { mass: f64 },

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },

    #[error("spectral assumption violated: {0}")]
    SpectralAssumptionViolated(String),

    #[error("tail not resolved: boundary amplitude ratio {ratio:e} exceeds {limit:e}")]
    TailNotResolved { ratio: f64, limit: f64 },

    #[error("shift t = {t} moves the state outside the grid (half width {half_width})")]
    ShiftOutOfDomain { t: u32, half_width: f64 },

    #[error("descriptor is not differentiable at x = {x}")]
    NotDifferentiable { x: f64 },

    #[error("invalid energy: {0}")]
    InvalidEnergy(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("validation error in `{field}`: {message}")]
    Validation { field: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

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

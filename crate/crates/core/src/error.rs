use thiserror::Error;

/// Errors raised while constructing or evaluating fields and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 3, got {0}")]
    InvalidDimension(usize),
    #[error("point has {got} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("scale must be positive and finite, got {0}")]
    NonpositiveScale(f64),
    #[error("field value {value} is not positive; K is undefined")]
    NonpositiveValue { value: f64 },
    #[error("point coincides with the inversion center")]
    AtCenter,
    #[error("kernel evaluated at its singularity")]
    Coincident,
    #[error("invalid radii: inner {inner}, outer {outer}")]
    BadRadii { inner: f64, outer: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("cutoff supports overlap: separation {separation} <= {required}")]
    Overlap { separation: f64, required: f64 },
    #[error("admissible band for rho_M is empty (delta too large for alpha and n)")]
    NoSolution,
    #[error("kappa^2 = {0} must be below 1")]
    KappaTooLarge(f64),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("point {radius} away from the window center exceeds the window radius {window}")]
    OutOfDomain { radius: f64, window: f64 },
    #[error("bubble fit left the admissible scale range (mu = {mu})")]
    FitDiverged { mu: f64 },
    #[error("objective is not finite at {at:?}")]
    NonFinite { at: Vec<f64> },
    #[error("singular profile violated at distance {distance}: {what}")]
    ProfileViolated { distance: f64, what: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

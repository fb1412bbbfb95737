use thiserror::Error;

/// Errors raised by kernel construction, symbol evaluation and the root finders.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation point {point} is within {distance:e} of the pole at -{gamma}")]
    PoleProximity { point: String, gamma: f64, distance: f64 },

    #[error("argument {arg:.6} of {point} lies outside the sector |arg| < pi - {delta}")]
    SectorViolation { point: String, arg: f64, delta: f64 },

    #[error("quadrature did not reach tolerance: estimated error {estimate:e} after {panels} panels")]
    Quadrature { estimate: f64, panels: usize },

    #[error("no sign change on [{lo}, {hi}] (f(lo) = {flo:e}, f(hi) = {fhi:e})")]
    BracketFailure { lo: f64, hi: f64, flo: f64, fhi: f64 },

    #[error("fixed-point map is not contracting (ratio {ratio:.4} after {iterations} iterations)")]
    ContractionFailed { ratio: f64, iterations: usize },

    #[error("Newton iteration stalled at {last} with residual {residual:e}")]
    NoConvergence { last: String, residual: f64 },

    #[error("QR iteration did not converge after {sweeps} sweeps")]
    QrNoConvergence { sweeps: usize },

    #[error("intermediate value {0:e} exceeds the overflow guard")]
    Overflow(f64),

    #[error("kernel has {terms} terms, above the polynomial-route cap of {cap}")]
    TooManyTerms { terms: usize, cap: usize },

    #[error("S = {s} does not exceed the threshold {threshold}; mode is not unstable")]
    NotUnstable { s: f64, threshold: f64 },

    #[error("only {found} envelope peaks in trace, need at least {needed}")]
    InsufficientPeaks { found: usize, needed: usize },

    #[error("time step {dt} exceeds the stability limit {limit}")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

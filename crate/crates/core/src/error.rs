use thiserror::Error;

/// Errors raised by grid construction, kernels, relaxation drivers and bounds.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum WrError {
    #[error("partition boundaries must be strictly increasing")]
    NonIncreasingBoundaries,
    #[error("at least two subdomains are required, got {0}")]
    TooFewSubdomains(usize),
    #[error("time window {t_end} is not an integer multiple of step {dt}")]
    NonDivisibleWindow { t_end: f64, dt: f64 },
    #[error("invalid time grid: {0}")]
    InvalidTimeGrid(String),
    #[error("invalid space grid: {0}")]
    InvalidSpaceGrid(String),
    #[error("interface at x = {x} does not coincide with a grid node")]
    InterfaceOffGrid { x: f64 },
    #[error("incompatible grids: {0}")]
    IncompatibleGrids(String),
    #[error("tridiagonal system is singular")]
    SingularSystem,
    #[error("CFL number {cfl} exceeds 1")]
    CflViolation { cfl: f64 },
    #[error("flux can only be extracted at a Dirichlet boundary")]
    WrongBoundaryKind,
    #[error("unsupported subdomain count {0}")]
    UnsupportedCount(usize),
    #[error("error metric requested but no reference is available")]
    NoReference,
    #[error("odd-count bound requested for an even number of subdomains")]
    EvenCount,
    #[error("even-count bound requested for an odd number of subdomains")]
    OddCount,
    #[error("equal-width bound requested for unequal widths")]
    UnequalWidths,
    #[error("Q series did not converge within {0} terms")]
    QDiverged(usize),
    #[error("time windows differ: source ends at {src}, target at {dst}")]
    WindowMismatch { src: f64, dst: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, WrError>;

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors surfaced by the estimation, analytics and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An operation that needs at least one value received none.
    #[error("empty input")]
    EmptyInput,
    /// A configuration value is out of its admissible range.
    #[error("invalid configuration: {0}")]
    ConfigError(String),
    /// Two containers that must have equal lengths do not.
    #[error("shape mismatch: expected length {expected}, got {got}")]
    ShapeError { expected: usize, got: usize },
    /// A sampler could not produce a usable value (e.g. repeated underflow).
    #[error("numerical failure: {0}")]
    NumericalError(String),
    /// Moment order above the supported recursion depth.
    #[error("unsupported moment order {0} (max 12)")]
    UnsupportedOrder(usize),
    /// The requested concentration has no implemented density formula.
    #[error("no density formula for alpha = {alpha} with n = {n}")]
    UnsupportedAlpha { alpha: f64, n: usize },
    /// Density evaluation requested exactly at an atom of the sample.
    #[error("density is singular at sample point {0}")]
    AtomError(f64),
    /// Adaptive quadrature ran out of subdivision budget.
    #[error("quadrature did not converge: {0}")]
    QuadratureError(String),
    /// An argument lies outside the domain of a closed-form bound.
    #[error("argument outside bound domain: {0}")]
    DomainError(String),
    /// The distribution has no finite mean for these parameters.
    #[error("mean undefined for {0}")]
    UndefinedMean(String),
    /// Exhaustive enumeration requested beyond its budget.
    #[error("enumeration budget exceeded: m = {0} (max 14)")]
    BudgetError(usize),
    /// Exact integer arithmetic would overflow.
    #[error("integer overflow for m = {0} (max 92)")]
    OverflowError(usize),
}

impl Error {
    /// True for errors that indicate a numerical failure at runtime rather
    /// than a caller mistake; the CLI maps these to a distinct exit code.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NumericalError(_) | Error::QuadratureError(_))
    }
}

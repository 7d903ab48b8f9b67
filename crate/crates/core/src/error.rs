use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpxError {
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("functional is not positive definite: lambda_{index} = {value}")]
    NotPositiveDefinite { index: usize, value: f64 },
    #[error("shift {shift} lies in the support; singular integrand")]
    ShiftInsideSupport { shift: f64 },
    #[error("kernel polynomials undefined: P_{degree}(k) vanishes")]
    KernelUndefined { degree: usize },
    #[error("iterated kernel undefined: cross sum of degree {degree} vanishes")]
    IteratedUndefined { degree: usize },
    #[error("degenerate denominator: {0}")]
    DegenerateDenominator(String),
    #[error("evaluation point coincides with the shift")]
    EvalAtShift,
    #[error("sample point {x} hits a pole of the recovery quotient (degree {degree})")]
    PoleAtSample { degree: usize, x: f64 },
    #[error("coefficient constraint violated at degree {degree}: residual {residual:e}")]
    ConstraintViolated { degree: usize, residual: f64 },
    #[error("invalid alphas: {0}")]
    InvalidAlphas(String),
    #[error("continued fraction denominator vanished at depth {depth}")]
    ZeroDenominator { depth: usize },
    #[error("no convergence: {0}")]
    NonConvergent(String),
    #[error("series diverges for |z| = {0}")]
    Divergent(f64),
    #[error("division by zero in chain parameter recurrence at index {0}")]
    DivisionByZero(usize),
    #[error("recurrence coefficients unavailable beyond degree {0}")]
    CoefficientsUnavailable(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, OpxError>;

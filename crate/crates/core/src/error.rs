use thiserror::Error;

/// Errors raised by the algebraic engines.
///
/// Validation failures (bad input, broken preconditions) and detector
/// failures (an exact division that should have been integral) share one
/// enum; [`Error::is_internal`] separates the latter for exit-code purposes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("coefficient {coefficient} of monomial {monomial} is not divisible by {divisor}")]
    IntegralityViolation {
        monomial: String,
        coefficient: String,
        divisor: String,
    },
    #[error("variable {0} has no binding")]
    UnboundVariable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("product of {len} elements is undefined for p = {p} (need len = 1 mod p-1)")]
    LengthNotAdmissible { len: usize, p: u32 },
    #[error("ghost congruence fails at level {level}")]
    DworkCongruenceFailed { level: usize },
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("algebra is not reduced: nilradical has dimension {0}")]
    NotReduced(usize),
    #[error("no nonzero root found within extension degree {0}")]
    ExtensionCapExceeded(u32),
    #[error("windowed sum at index -{index} did not stabilize within {cap} steps")]
    StabilizationNotDetected { index: usize, cap: usize },
    #[error("matrix row {0} is not a morphism of split p-polar algebras")]
    NotAMorphism(usize),
    #[error("element is not nilpotent")]
    NonNilpotentElement,
    #[error("group law has monomial x^{0} y^{1} of inadmissible degree")]
    LawNotPolar(usize, usize),
    #[error("law is not p-integral: denominator {0} at x^{1} y^{2}")]
    NotIntegral(String, usize, usize),
    #[error("invariant violated: {0}")]
    Internal(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::IntegralityViolation { .. }
                | Error::ExtensionCapExceeded(_)
                | Error::Internal(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Invalid(e.to_string())
    }
}

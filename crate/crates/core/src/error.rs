//! Crate-wide error type.

use std::fmt;

/// Errors reported by constructors and checkers.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A requested derivative order exceeds the supported stencil order.
    OrderTooHigh { requested: usize, max: usize },
    /// A bump integrated to (numerically) zero and cannot be normalized.
    DegenerateBump { integral: f64 },
    /// The moment Gram matrix is numerically singular.
    SingularSystem { cond: f64 },
    /// Operands live in different dimensions.
    DimensionMismatch { left: usize, right: usize },
    /// Blended mollifiers must share the declared order.
    OrderMismatch { left: usize, right: usize },
    /// The support ball B_{eps C}(x) leaves the domain, or eps exceeds eps0.
    MarginViolation { eps: f64, detail: String },
    /// An integral over x requires a compact x-support descriptor on f.
    MissingSupportDescriptor,
    /// A flow trajectory left the domain.
    DomainExit { at: Vec<f64> },
    /// A slope fit needs at least four geometric samples.
    InsufficientSamples { got: usize, need: usize },
    /// Malformed input that fits no other category.
    InvalidInput(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::OrderTooHigh { requested, max } => {
                write!(f, "derivative order {requested} exceeds supported order {max}")
            }
            Error::DegenerateBump { integral } => {
                write!(f, "bump integral {integral:e} below positivity floor")
            }
            Error::SingularSystem { cond } => {
                write!(f, "moment system numerically singular (cond ~ {cond:.3e})")
            }
            Error::DimensionMismatch { left, right } => {
                write!(f, "dimension mismatch: {left} vs {right}")
            }
            Error::OrderMismatch { left, right } => {
                write!(f, "mollifier order mismatch: {left} vs {right}")
            }
            Error::MarginViolation { eps, detail } => {
                write!(f, "margin violation at eps = {eps}: {detail}")
            }
            Error::MissingSupportDescriptor => {
                write!(f, "integration over x requires a compact x-support descriptor")
            }
            Error::DomainExit { at } => write!(f, "flow left the domain near {at:?}"),
            Error::InsufficientSamples { got, need } => {
                write!(f, "need at least {need} samples, got {got}")
            }
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

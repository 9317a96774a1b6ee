use thiserror::Error;

use crate::interaction::AxiomReport;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid algebra descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element is not positive (min eigenvalue {0:.3e})")]
    NotPositive(f64),
    #[error("generated subalgebra did not stabilise after {0} rounds")]
    NoClosure(usize),
    #[error("interaction axioms fail: {}", .0.failures().join(", "))]
    AxiomsFailed(Box<AxiomReport>),
    #[error("not a conditional expectation: {0}")]
    NotConditionalExpectation(String),
    #[error("restricted maps are not mutually inverse (residual {0:.3e})")]
    NotInverse(f64),
    #[error("endomorphism/transfer operator pair rejected: {0}")]
    EndoTransfer(String),
    #[error("quotient is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("element is not in the span of the generators (residual {0:.3e})")]
    NotInSpan(f64),
    #[error("action depends on the presentation (residual {0:.3e})")]
    PresentationDependent(f64),
    #[error("not a partial isometry (residual {0:.3e})")]
    NotPartialIsometry(f64),
    #[error("no solution within tolerance: {0}")]
    Unsolvable(String),
    #[error("degenerate representation: {0}")]
    Degenerate(String),
    #[error("not closed under the ternary product (residual {0:.3e})")]
    NotTernaryClosed(f64),
    #[error("{check} fails at {element} (residual {residual:.3e})")]
    Invariant { check: String, element: String, residual: f64 },
    #[error("{0}")]
    Precondition(String),
    #[error("problem file: {0}")]
    Problem(String),
}

pub type Result<T> = std::result::Result<T, Error>;

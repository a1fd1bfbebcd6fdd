use thiserror::Error;

/// Errors raised by function construction, constraint oracles and solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element {id} out of range for ground set of size {n}")]
    OutOfRange { id: usize, n: usize },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("degenerate function: {0}")]
    Degenerate(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("rounding failed: {0}")]
    Rounding(String),
    #[error("coverage target unreachable: target {target}, attainable {attainable}")]
    Coverage { target: f64, attainable: f64 },
    #[error("target {target} exceeds attainable value {attainable} for function {index}")]
    InfeasibleTarget {
        index: usize,
        target: f64,
        attainable: f64,
    },
    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),
}

pub type Result<T> = std::result::Result<T, Error>;

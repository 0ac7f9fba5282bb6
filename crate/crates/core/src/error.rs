use thiserror::Error;

/// Violations of the standing assumptions on the step law.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("step distribution is empty")]
    Empty,
    #[error("step {0} listed more than once")]
    DuplicateStep(i64),
    #[error("negative probability {prob} at step {step}")]
    NegativeProbability { step: i64, prob: f64 },
    #[error("probabilities sum to {0}, expected 1")]
    Mass(f64),
    #[error("step mean is {0}, expected 0")]
    Mean(f64),
    #[error("fewer than two support points carry positive probability")]
    Degenerate,
    #[error("support lies on a sublattice of spacing {0}")]
    Sublattice(u64),
    #[error("return times to the origin share period {0}")]
    Periodic(u64),
}

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Walk(#[from] WalkError),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("quadrature did not converge: {0}")]
    Quadrature(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

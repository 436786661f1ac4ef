use thiserror::Error;

use crate::solver::SolveResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("negative probability mass {value} at flat index {index}")]
    NegativeMass { index: usize, value: f64 },

    #[error("table sums to {sum}, which is not within 1e-6 of 1")]
    NotNormalized { sum: f64 },

    #[error("table has {got} entries but the variables require {expected}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("invalid variable: {0}")]
    InvalidVariable(String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("arguments overlap or are empty: {0}")]
    OverlappingArguments(String),

    #[error("groups do not partition the variables: {0}")]
    NotAPartition(String),

    #[error("marginals disagree on the target marginal (max deviation {deviation:e})")]
    InconsistentMarginals { deviation: f64 },

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("transportation problem is infeasible: {0}")]
    InfeasibleConstraints(String),

    #[error("table is not consistent with the given feasible point (deviation {deviation:e})")]
    MarginalMismatch { deviation: f64 },

    #[error("solver stopped after {} iterations with gap {:e}", .0.iterations, .0.gap)]
    IterationLimitExceeded(Box<SolveResult>),

    #[error("grid oracle needs {dims} free coordinates, at most {max} supported")]
    DimensionTooLarge { dims: usize, max: usize },

    #[error("lattice size n = {0} is outside 1..=4")]
    NTooLarge(usize),

    #[error("invalid antichain: {0}")]
    InvalidAntichain(String),

    #[error("redundancy assignment has no value for antichain {0}")]
    MissingNode(String),

    #[error("shape with {0} states exceeds the sampler limit")]
    ShapeTooLarge(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("state {0:?} listed more than once")]
    DuplicateState(Vec<usize>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

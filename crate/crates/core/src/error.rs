use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacError {
    #[error("node {0} has zero degree")]
    IsolatedNode(usize),

    #[error("shape mismatch: expected {expected:?}, found {found:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },

    #[error("value out of domain: {0}")]
    DomainError(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("eigensolver failed (LAPACK info {info}) on a {n}x{n} matrix; max |entry| = {max_abs:e}, asymmetry = {asymmetry:e}")]
    ConvergenceFailure { info: i32, n: usize, max_abs: f64, asymmetry: f64 },

    #[error("matrix is not symmetric (max |A - A^T| = {0:e})")]
    NotSymmetric(f64),

    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),

    #[error("spectral distance is zero; gradient undefined")]
    ZeroDistance,

    #[error("eigenvalue {value} has multiplicity {multiplicity}")]
    DegenerateEigenvalues { value: f64, multiplicity: usize },

    #[error("budget of {0} flips is too small for an attack")]
    BudgetTooSmall(f64),

    #[error("budget of {budget} flips exceeds the {available} available pairs")]
    BudgetTooLarge { budget: usize, available: usize },

    #[error("graph has no node labels")]
    MissingLabels,

    #[error("graph has no node features")]
    MissingFeatures,

    #[error("graph has no train/test split")]
    MissingSplit,

    #[error("target node {0} has no label")]
    UnlabeledTarget(usize),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("checkpoint: {0}")]
    Checkpoint(String),
}

pub type Result<T> = std::result::Result<T, SpacError>;

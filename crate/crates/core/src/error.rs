use alloc::string::String;

/// Errors produced by the solvers and verifiers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("chain length {sites} exceeds the capacity cap of {cap} sites")]
    Capacity { sites: usize, cap: usize },
    #[error("stationary state is not unique: {0}")]
    NonUniqueSteadyState(String),
    #[error("absorbing configuration {0}")]
    Absorbing(String),
    #[error("negative probability {value:e} at configuration index {index}")]
    NegativeProbability { index: usize, value: f64 },
    #[error("did not converge: {0}")]
    NonConvergent(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unknown relation kind `{0}`")]
    UnknownKind(String),
    #[error("relation {kind} needs scalar `{name}`")]
    MissingScalar { kind: &'static str, name: &'static str },
}

pub type Result<T> = core::result::Result<T, Error>;

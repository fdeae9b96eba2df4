use thiserror::Error;

/// Errors raised by constructors and analyses in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid probability vector: {0}")]
    InvalidPmf(String),

    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid partial order: {0}")]
    InvalidPoset(String),

    #[error("kernel is reducible: {0}")]
    Reducible(String),

    #[error("kernel is not ergodic: {0}")]
    NotErgodic(String),

    #[error("pmf is not stationary for the kernel (max residual {residual:.3e})")]
    NotStationary { residual: f64 },

    #[error("kernel is not reversible with respect to pi (max defect {defect:.3e})")]
    NotReversible { defect: f64 },

    #[error("kernel is not stochastically monotone: {0}")]
    NotMonotone(String),

    #[error("down-set enumeration exceeded the cap of {cap} ideals")]
    DownSetCap { cap: usize },

    #[error("pmf is not log-concave at index {index}")]
    NotLogConcave { index: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("positive-correlations precondition fails on class {class}")]
    NoPositiveCorrelations { class: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

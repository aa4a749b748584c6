use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeaError {
    #[error("invalid material: {0}")]
    InvalidMaterial(String),
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("invalid load: {0}")]
    InvalidLoad(String),
    #[error("under-constrained system: {0}")]
    UnderConstrained(String),
    #[error("linear solve failed, relative residual {residual:e}")]
    Numerical { residual: f64 },
    #[error("shape mismatch: expected {expected}, found {found}")]
    Shape { expected: usize, found: usize },
}

pub type Result<T> = std::result::Result<T, FeaError>;

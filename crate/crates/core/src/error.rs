use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("dimension {dim} exceeds the configured cap of {cap}")]
    ResourceLimit { dim: usize, cap: usize },

    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("vector is not normalized (norm {0})")]
    NotUnit(f64),

    #[error("invalid dimensions: {0}")]
    InvalidDims(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// The composed map has a vanishing `1 Tr` coefficient and cannot be
    /// rescaled into the normalized family. The raw coefficients are
    /// `[trace, alpha, beta, gamma]`.
    #[error("degenerate composition with raw coefficients {coefficients:?}")]
    DegenerateComposition { coefficients: [f64; 4] },
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has a non-finite entry")]
    NonFinite,
    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),
    #[error("trace deviates from 1 by {0:e}")]
    TraceDeviation(f64),
    #[error("eigenvalue {0:e} is below the positivity tolerance")]
    NegativeEigenvalue(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error("index {index} out of range for {len} blocks")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("operator {0} is not an orthogonal projector")]
    NotAProjector(usize),
    #[error("projectors {0} and {1} are not mutually orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("projectors do not resolve the identity")]
    IncompleteResolution,
    #[error("Ky-Fan index {k} outside 1..={max}")]
    KOutOfRange { k: usize, max: usize },
    #[error("measure is only defined for two-block decompositions (got {0} blocks)")]
    NotBipartite(usize),
    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),
    #[error("invalid norm specification: {0}")]
    InvalidNorm(String),
    #[error("optimizer did not converge (best value {0})")]
    OptimizerDidNotConverge(f64),
    #[error("lifted space dimension {dim} exceeds cap {cap}")]
    TargetTooLarge { dim: usize, cap: usize },
    #[error("unsupported structure: {0}")]
    UnsupportedStructure(String),
    #[error("support condition failed: {0}")]
    SupportFailure(String),
    #[error("Kraus operators do not form a channel: {0}")]
    NotTracePreserving(String),
    #[error("local channels leak out of the single-particle sector (deviation {0:e})")]
    NotTracePreservingOnSector(f64),
    #[error("coefficient matrix is not a contraction (largest singular value {0})")]
    CoefficientMatrixTooLarge(f64),
    #[error("operator is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid rates: {0}")]
    InvalidRates(String),
    #[error("evolved state failed validation: {0}")]
    ValidationFailure(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

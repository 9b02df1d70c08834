use thiserror::Error;

/// Errors raised by the numerical kernels and the model types built on them.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian: max |A - A^H| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("rank deficient: smallest/largest Gram eigenvalue = {ratio:e}")]
    RankDeficient { ratio: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },

    #[error("matrix is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("positivity lost during evolution: min eigenvalue {min_eigenvalue:e}")]
    PositivityLost { min_eigenvalue: f64 },

    #[error("Bloch vector outside the unit ball: |r| = {norm}")]
    BallViolation { norm: f64 },

    #[error("operation requires dimension {expected}, found {found}")]
    WrongDimension { expected: usize, found: usize },

    #[error("basis is not orthonormal: max |<e_i|e_j> - delta_ij| = {deviation:e}")]
    BasisNotOrthonormal { deviation: f64 },

    #[error("bad quorum weights: {0}")]
    BadWeights(String),

    #[error("quorum is not informationally complete: rank {rank} < {required}")]
    IncompleteQuorum { rank: usize, required: usize },

    #[error("sector {sector} sums to {sum}, expected {expected}")]
    SectorSumViolation { sector: usize, sum: f64, expected: f64 },

    #[error("negative entry {value} at ({row}, {col})")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("negative transition rate {value} at ({row}, {col})")]
    NegativeRate { row: usize, col: usize, value: f64 },

    #[error("column {col} sums to {sum}, expected {expected}")]
    ColumnSum { col: usize, sum: f64, expected: f64 },

    #[error("quorum shape unsupported: {0}")]
    WrongQuorumShape(String),

    #[error("lift strategy {0} is unavailable for this quorum")]
    StrategyUnavailable(&'static str),

    #[error("bad block partition: {0}")]
    BadPartition(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("time must be finite and non-negative, got {0}")]
    BadTime(f64),

    #[error("time grid does not resolve the generator: {0}")]
    GridTooNarrow(String),
}

pub type Result<T> = std::result::Result<T, Error>;

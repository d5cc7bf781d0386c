use thiserror::Error as ThisError;

use crate::structure::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, ThisError)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("structure function is negative at x = {x}: value {value:e}")]
    Negative { x: f64, value: f64 },

    #[error("structure function has a non-negligible imaginary part at x = {x}: {im:e}")]
    NotReal { x: f64, im: f64 },

    #[error("non-finite value at {context}")]
    NonFinite { context: String },

    #[error("factorial product overflows at n = {n}")]
    Overflow { n: i64 },

    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("no Fock representation: F(0) = {f0:e} must vanish")]
    NoFockRepresentation { f0: f64 },

    #[error("structure function vanishes at interior level n = {n}; the basis degenerates (use the isos module for two-vacuum algebras)")]
    InteriorZero { n: usize },

    #[error("cyclic representation not admissible: {reason}")]
    Inadmissible { reason: String },

    #[error("xi must have unit modulus for A† to be the adjoint of A (|xi| = {modulus})")]
    NonUnitXi { modulus: f64 },

    #[error("operation requires a {expected} representation, got {found}")]
    KindMismatch { expected: String, found: String },

    #[error("truncation too small: tail ratio {tail:e} exceeds {tol:e}; dim >= {required} is needed")]
    InadequateTruncation { tail: f64, tol: f64, required: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hypergeometric parameter {0} is a pole (non-positive integer)")]
    PoleParameter(f64),

    #[error("series did not converge within {terms} terms")]
    SeriesNotConverged { terms: usize },

    #[error("dimension {dim} exceeds the cap {cap}")]
    DimensionTooLarge { dim: usize, cap: usize },

    #[error("verification failed: {0}")]
    Verification(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}

use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid algebra specification: {0}")]
    InvalidAlgebra(String),

    #[error("algebra mismatch: {left:?} vs {right:?}")]
    AlgebraMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("function undefined at spectral value {value}")]
    Undefined { value: f64 },

    #[error("zero projection has an empty compressed algebra")]
    ZeroProjection,

    #[error("requested rank {rank} exceeds block size {block_size}")]
    RankTooLarge { rank: usize, block_size: usize },

    #[error("empty input set")]
    EmptySet,

    #[error("element is not in the constraint space (distance {distance:e})")]
    NotInSpan { distance: f64 },

    #[error("directions are linearly dependent (Gram eigenvalue ratio {ratio:e})")]
    DependentDirections { ratio: f64 },

    #[error("mean value lies outside the convex support (violation {violation:e})")]
    OutsideConvexSupport {
        /// Coefficients `c` such that `<c, xi>` exceeds the maximal spectral value of `sum c_i u_i`.
        certificate: Vec<f64>,
        violation: f64,
    },

    #[error("solver budget exhausted (residual {residual:e})")]
    BudgetExhausted { residual: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state is not in the rI-closure (moved by {distance:e} under projection)")]
    NotInClosure { distance: f64 },

    #[error("orthogonality hypothesis violated (inner product {inner:e})")]
    HypothesisViolated { inner: f64 },

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

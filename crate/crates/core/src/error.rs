use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vector norm {norm:e} is too small to normalize")]
    ZeroVector { norm: f64 },

    #[error("a sphere point needs at least 2 coordinates, got {len}")]
    DimensionTooSmall { len: usize },

    #[error("dimension mismatch: expected ambient dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} = {value} is out of range")]
    OutOfRange { what: &'static str, value: f64 },

    #[error("normals are parallel (inner product {dot})")]
    ParallelNormals { dot: f64 },

    #[error("Monte Carlo budget {budget} below the minimum {min}")]
    BudgetTooSmall { budget: usize, min: usize },

    #[error("rotation plane vectors are not orthogonal (inner product {dot:e})")]
    NotOrthogonal { dot: f64 },

    #[error("point lies on the rotation axis; its in-plane angle is undefined")]
    DegenerateProjection,

    #[error("grid resolution {resolution} gives error bound {error} > 0.5")]
    ResolutionTooCoarse { resolution: usize, error: f64 },

    #[error("{m} points exceed the shattering checker limit of {max}")]
    TooManyPoints { m: usize, max: usize },

    #[error("estimated cost {cost:e} exceeds budget {budget:e}")]
    BudgetExceeded { cost: f64, budget: f64 },

    #[error("harmonic threshold (H_l - 2) l < 1 for l = {ell}")]
    ThresholdNonpositive { ell: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

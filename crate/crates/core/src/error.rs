use thiserror::Error;

/// Errors produced by geometric constructions, solvers, estimators and the
/// experiment runner.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {0} is not supported (expected 1..=4)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("direction is the zero vector")]
    ZeroDirection,

    #[error("direction is not part of the support table grid")]
    OffGrid,

    #[error("origin is not an interior point of the body (margin {margin:e})")]
    OriginNotInterior { margin: f64 },

    #[error("negative support value {value:e} detected; the body does not contain the origin")]
    NegativeSupport { value: f64 },

    #[error("operation not supported for this representation: {0}")]
    Unsupported(String),

    #[error("linear program too large: {vars} variables, {rows} constraints")]
    LpTooLarge { vars: usize, rows: usize },

    #[error("linear program is numerically singular: {0}")]
    Singular(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("convex hull construction failed: {0}")]
    Hull(String),

    #[error("ill-conditioned Steiner system (condition {condition:e} exceeds {bound:e})")]
    IllConditioned { condition: f64, bound: f64 },

    #[error("functional value is zero; pair is not admissible")]
    NotAdmissible,

    #[error("generated body violates its family predicate: {0}")]
    Predicate(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised anywhere in the engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("unsupported type: {0}")]
    UnsupportedType(String),
    #[error("weight {0} is not dominant")]
    NotDominant(String),
    #[error("{0} is not a multiple of the distinguished weight")]
    NotMultipleOfVarpi(String),
    #[error("module of dimension {dim} exceeds the size bound {bound}")]
    SizeBound { dim: usize, bound: usize },
    #[error("bar matrix is not unitriangular: {0}")]
    TriangularityFailure(String),
    #[error("span is not spanned by global basis vectors: {0}")]
    NotBasedSpan(String),
    #[error("lifting hypothesis fails at i={i}, b={b}")]
    HypothesisFailed { i: usize, b: String },
    #[error("ibar is not unique: {0}")]
    NonUniqueIbar(String),
    #[error("expected a line, got dimension {0}")]
    WrongDimension(usize),
    #[error("transport is ill defined at {0}")]
    IllDefinedTransport(String),
    #[error("no registered check matches {0}")]
    NoSuchCheck(String),
    #[error("weight dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

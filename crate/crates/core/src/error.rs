use thiserror::Error;

use crate::geometry::LatticePoint;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("empty point set")]
    EmptyPointSet,
    #[error("point set is not convex: completion adds {added} lattice point(s), first {first}")]
    NotConvex { added: usize, first: LatticePoint },
    #[error("not a boundary vertex: {0}")]
    NotBoundaryVertex(LatticePoint),
    #[error("point {0} is not in the shape")]
    PointNotInShape(LatticePoint),
    #[error("shape is not a subset of the enclosing shape (first missing point {0})")]
    NotSubset(LatticePoint),
    #[error("removal chain step {step}: {reason}")]
    ChainStep { step: usize, reason: String },
    #[error("direction ({0}, {1}) is not a primitive nonzero vector")]
    NotPrimitive(i64, i64),
    #[error("matrix is not unimodular (determinant {0})")]
    NotUnimodular(i64),
    #[error("undefined cell {0}")]
    UndefinedCell(LatticePoint),
    #[error("undefined cells {0:?}")]
    UndefinedCells(Vec<LatticePoint>),
    #[error("shape exceeds domain: no admissible translate")]
    ShapeExceedsDomain,
    #[error("window too small: the probe shape needs a {width}x{height} region")]
    WindowTooSmall { width: i64, height: i64 },
    #[error("orbit closure not finitely computable for a {0} source")]
    OrbitNotComputable(&'static str),
    #[error("operation requires a periodic configuration")]
    RequiresPeriodic,
    #[error("requires exhaustive counts")]
    RequiresExhaustive,
    #[error("alphabet must have at least {need} symbols (has {have})")]
    AlphabetTooSmall { need: usize, have: usize },
    #[error("alphabet error: {0}")]
    Alphabet(String),
    #[error("substitution rule has no block for symbol {0:?}")]
    MissingRule(String),
    #[error("exhaustive search budget exceeded: {size} points > budget {budget}")]
    BudgetExceeded { size: usize, budget: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot represent this configuration in the file format: {0}")]
    NotRepresentable(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("json error: {0}")]
    Json(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

pub(crate) fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

use thiserror::Error;

/// Errors raised by the engine.
///
/// Variants split into two families: malformed input (`Parse`, `InvalidGraph`)
/// and violated preconditions of an otherwise well-formed request.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("cannot compose: range {range} of the left path differs from source {source_vertex} of the right path")]
    NotComposable { range: String, source_vertex: String },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("path is not closed")]
    NotClosed,
    #[error("cannot shift a finite path of length {len} by {by}")]
    OverShift { len: usize, by: usize },
    #[error("invalid boundary point: {0}")]
    InvalidPoint(String),
    #[error("class elements live over different base points")]
    BaseMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("cannot certify irreducibility: {0}")]
    CannotCertify(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("groupoid elements are not composable")]
    MiddleMismatch,
    #[error("degree {k} is not realizable for this pair of points")]
    UnrealizableDegree { k: i64 },
    #[error("coefficient module incompatible with isotropy: {0}")]
    IncompatibleCoefficients(String),
    #[error("wrong isomorphism for this base point: {0}")]
    WrongIsomorphism(String),
    #[error("twist mismatch: {0}")]
    TwistMismatch(String),
    #[error("field not supported for enumeration: {0}")]
    UnsupportedField(String),
    #[error("map undefined on basis vector {0}")]
    PartialMap(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    /// True for errors caused by malformed input text.
    pub fn is_parse(&self) -> bool {
        matches!(self, Error::Parse(_) | Error::InvalidGraph(_))
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

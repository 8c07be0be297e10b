use thiserror::Error;

/// Failure to build a [`Network`](crate::netmodel::Network) from parts.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum NetworkError {
    #[error("invalid vertex label {0:?}")]
    InvalidLabel(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("self-loop on vertex {0:?}")]
    SelfLoop(String),
    #[error("duplicate edge {head:?} -> {tail:?}")]
    DuplicateEdge { head: String, tail: String },
    #[error("susceptance must be positive and finite, got {0}")]
    NonPositiveSusceptance(f64),
    #[error("a walk needs at least two vertices")]
    ShortWalk,
}

/// `.dgnet` parse failure; `line` is 1-based.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatrixError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PartitionError {
    #[error("boundary vertex {0:?} cannot be eliminated")]
    BoundaryElimination(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("at least two vertices must be retained, got {0}")]
    TooFewRetained(usize),
    #[error("retained set must be a proper subset of the vertices")]
    NotProper,
    #[error("partition has no retained/eliminated split")]
    Incomplete,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ReductionError {
    #[error("Kron reduction does not exist: eliminated vertices {unreachable:?} have no path to a retained vertex")]
    NotReducible { unreachable: Vec<String> },
    #[error("eliminated block is singular (pivot {pivot:e} at position {position})")]
    SingularBlock { position: usize, pivot: f64 },
    #[error("zero pivot at step {step} while eliminating vertex {vertex:?}")]
    ZeroPivot { step: usize, vertex: String },
    #[error("not a Laplacian: {0}")]
    NotALaplacian(String),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("missing value for vertex {0:?}")]
    MissingValue(String),
    #[error("phase shift {shift} at vertex {label:?} outside [-0.6, 0.6]")]
    ShiftOutOfRange { label: String, shift: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OrientError {
    #[error("cannot orient lines: {}", .0.iter().map(|l| format!("{}-{} ({})", l.a, l.b, l.reason)).collect::<Vec<_>>().join(", "))]
    UnorientableLines(Vec<UnorientableLine>),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnorientableLine {
    pub a: String,
    pub b: String,
    pub reason: &'static str,
}

//! Error types shared across the library.

use thiserror::Error;

/// Errors raised while parsing or combining selective patterns.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PatternError {
    #[error("unknown symbol {symbol:?} at line {line}, col {col}")]
    UnknownSymbol { symbol: String, line: usize, col: usize },
    #[error("ragged row at line {line}: expected {expected} cells, found {found}")]
    RaggedRow { line: usize, expected: usize, found: usize },
    #[error("pattern has no cells")]
    Empty,
    #[error("pattern must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("{context}: dimensions {left:?} and {right:?} are incompatible")]
    DimensionMismatch {
        context: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
}

/// Errors raised while sampling numeric realizations.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SampleError {
    #[error("no regular realization found within {retries} retries; the pencil pattern likely admits none")]
    RegularityUnreachable { retries: u32 },
    #[error("invalid sample config: {reason}")]
    InvalidConfig { reason: String },
}

/// Errors raised by placement and co-design solvers.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum SolveError {
    #[error("pattern has no rows to place against")]
    EmptyProblem,
    #[error("cost matrix is {rows}x{cols}, expected {expected_rows}x{expected_cols}")]
    CostDimensionMismatch {
        rows: usize,
        cols: usize,
        expected_rows: usize,
        expected_cols: usize,
    },
    #[error("actuator and sensor solutions derive from different pivot choices")]
    MismatchedPivotChoice,
    #[error("structurally infeasible: {reason}")]
    Infeasible { reason: String },
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

/// Errors raised by the numeric oracle.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("pencil is singular: det(A - lambda E) vanishes at every probe point")]
    SingularPencil,
    #[error("subset enumeration over {actuators} actuators exceeds the budget of {budget}; use sampling")]
    SubsetBudgetExceeded { actuators: usize, budget: usize },
    #[error("{context}: dimensions are inconsistent")]
    Dimension { context: &'static str },
}

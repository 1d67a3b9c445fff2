use thiserror::Error;

/// Errors raised by mesh handling, assembly and the numerical solvers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate cell {cell}: measure {measure:e} below threshold {threshold:e}")]
    DegenerateCell {
        cell: usize,
        measure: f64,
        threshold: f64,
    },

    #[error("vertex map is not injective: vertices {first} and {second} coincide")]
    NonInjectiveMap { first: usize, second: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("field `{name}` has length {found}, expected {expected}")]
    FieldLength {
        name: String,
        found: usize,
        expected: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("linear solver did not converge in {iterations} iterations (relative residual {residual:e})")]
    LinearSolverNotConverged { iterations: usize, residual: f64 },

    #[error("eigensolver stagnated: {converged} of {requested} eigenpairs converged after {restarts} restarts")]
    EigenNotConverged {
        converged: usize,
        requested: usize,
        restarts: usize,
    },

    #[error("newton iteration did not converge for {model}: residual {residual:e}")]
    NewtonNotConverged { model: String, residual: f64 },

    #[error("kinetics cannot drive a Turing instability: {0}")]
    NotTuringCapable(String),

    #[error("no admissible wavenumber window: {0}")]
    NoWindow(String),

    #[error("root bracket not found: {0}")]
    BracketNotFound(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

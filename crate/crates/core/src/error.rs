use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not square: row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("alternative {0} beats itself")]
    Reflexive(usize),
    #[error("pair ({i}, {j}) has {count} winners, expected exactly one")]
    NotAntisymmetric { i: usize, j: usize, count: usize },
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("tournament needs at least one alternative")]
    Empty,
    #[error("cyclone needs an odd number of alternatives >= 3, got {0}")]
    EvenCyclone(usize),
    #[error("alternative set is empty")]
    EmptySet,
    #[error("alternative {index} out of range for {n} alternatives")]
    OutOfRange { index: usize, n: usize },
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid lottery: {0}")]
    InvalidLottery(String),
    #[error("{n} alternatives exceeds the exact-solve limit of {limit}")]
    SolveLimit { n: usize, limit: usize },
    #[error("invalid discrete-log range [{a}, {b})")]
    LdRange { a: u64, b: u64 },
    #[error("invalid urn: {0}")]
    InvalidUrn(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("non-finite value encountered at s = {s}")]
    NonFinite { s: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

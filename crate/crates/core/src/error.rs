use alloc::string::String;
use core::fmt;

/// Errors raised by the core crate.
///
/// Index values carried by variants are 1-based, matching every external
/// interface of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    NotSquare {
        rows: usize,
        cols: usize,
    },
    NotSymmetric {
        row: usize,
        col: usize,
    },
    NotPositiveDefinite {
        pivot: usize,
        value: f64,
    },
    IndexOutOfRange {
        index: usize,
        ground_n: usize,
    },
    GroundMismatch {
        expected: usize,
        found: usize,
    },
    EmptyComplement,
    NoConvergence {
        sweeps: usize,
    },
    InvalidParams(String),
    InvalidPartition(String),
    InvalidInstance(String),
    /// Brute-force enumeration refused; `evaluations` is the up-front cost estimate.
    GroundTooLarge {
        n: usize,
        cap: usize,
        evaluations: u128,
    },
    TooManySubsets {
        count: u128,
        limit: u128,
    },
    BinomialOverflow {
        n: usize,
        k: usize,
    },
}

pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotSquare { rows, cols } => {
                write!(f, "matrix is not square ({rows}x{cols})")
            }
            Error::NotSymmetric { row, col } => {
                write!(f, "matrix is not symmetric at entry ({row},{col})")
            }
            Error::NotPositiveDefinite { pivot, value } => write!(
                f,
                "matrix is not positive definite (Cholesky pivot {pivot} = {value:e})"
            ),
            Error::IndexOutOfRange { index, ground_n } => {
                write!(f, "index {index} outside ground set [1:{ground_n}]")
            }
            Error::GroundMismatch { expected, found } => {
                write!(
                    f,
                    "ground set size mismatch: expected {expected}, found {found}"
                )
            }
            Error::EmptyComplement => write!(f, "complement of the index set is empty"),
            Error::NoConvergence { sweeps } => {
                write!(
                    f,
                    "Jacobi iteration did not converge within {sweeps} sweeps"
                )
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::InvalidPartition(msg) => write!(f, "invalid partition: {msg}"),
            Error::InvalidInstance(msg) => write!(f, "invalid instance: {msg}"),
            Error::GroundTooLarge {
                n,
                cap,
                evaluations,
            } => write!(
                f,
                "ground set of size {n} exceeds brute-force cap {cap} (~{evaluations} evaluations)"
            ),
            Error::TooManySubsets { count, limit } => {
                write!(f, "{count} subsets requested, limit is {limit}")
            }
            Error::BinomialOverflow { n, k } => {
                write!(f, "binomial coefficient C({n},{k}) overflows u64")
            }
        }
    }
}

impl core::error::Error for Error {}

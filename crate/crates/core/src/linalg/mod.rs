//! Exact rational scalars, vectors and matrices.
//!
//! Everything here is exact; there is no floating-point path. Results are
//! always in canonical form, so equality checks are structural.

mod matrix;
mod rational;

pub use matrix::{gauss_inverse, mat_mul, mat_vec, RatMatrix, RatVector};
pub use rational::{rat, Rational};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LinalgError {
    #[error("zero denominator")]
    ZeroDenominator,
    #[error("malformed rational {0:?}")]
    Parse(String),
    #[error("rational {0:?} is not in lowest terms")]
    NotCanonical(String),
    #[error("dimension mismatch: {}x{} against {}x{}", left.0, left.1, right.0, right.1)]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular (no pivot in column {column})")]
    Singular { column: usize },
    #[error("vectors and matrices must have at least one entry")]
    Empty,
    #[error("{rows}x{cols} matrix needs {} entries, got {got}", rows * cols)]
    EntryCount {
        rows: usize,
        cols: usize,
        got: usize,
    },
    #[error("rows have different lengths")]
    Ragged,
}

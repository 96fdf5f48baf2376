//! Dense and sparse linear algebra kernels used by the solver.
//!
//! Element-local systems are tiny and handled by [`DenseMatrix`] with a
//! partial-pivoting LU. The global trace system is held in compressed-row
//! form ([`SparseRowMatrix`]) and factorized through `faer`'s sparse LU.

mod cond;
mod dense;
mod sparse;

pub use cond::{cond2, cond2_dense, cond2_sparse, CondEstimate, CondMethod, DENSE_SVD_LIMIT};
pub use dense::{lu_solve, DenseLu, DenseMatrix};
pub use sparse::{SparseLu, SparseRowMatrix};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix is singular: pivot {pivot:e} at column {column}")]
    Singular { column: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

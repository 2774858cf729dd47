//! Dense real linear algebra for small matrices.
//!
//! Everything the completion calculus needs lives here: a row-major
//! [`Matrix`], partial-pivoting LU (determinant, inverse, linear solves),
//! a cyclic Jacobi eigensolver for symmetric matrices, the PSD square
//! root, the polar decomposition `Σ = P·U` of a full-row-rank matrix and
//! the right pseudoinverse `Σᵀ(ΣΣᵀ)⁻¹`.
//!
//! Indices are 0-based throughout. The kernel targets desk-scale problems
//! (dimensions up to roughly 50); no blocking or sparsity is attempted.

mod eig;
mod lu;
mod matrix;
mod polar;

pub use eig::{sqrt_psd, sym_eig, SymEig};
pub use lu::{det, inverse, lu_factor, solve, LuFactorization};
pub use matrix::Matrix;
pub use polar::{cholesky, pinv_frr, pinv_via_polar, polar, PolarFactors};

use thiserror::Error;

/// Relative pivot threshold below which a matrix is treated as singular.
pub const PIVOT_TOL: f64 = 1e-14;

/// Relative threshold on the smallest Gram eigenvalue for full row rank.
pub const RANK_TOL: f64 = 1e-14;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("matrix is singular (pivot {pivot} below threshold)")]
    Singular { pivot: usize },
    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:e})")]
    NotPsd { eigenvalue: f64 },
    #[error("matrix is not positive definite (pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },
    #[error("matrix is not of full row rank (smallest eigenvalue of ΣΣᵀ is {min_eigenvalue:e})")]
    RankDeficient { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, LinalgError>;

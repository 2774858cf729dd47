//! Partially specified matrices and the log-determinant calculus on them.
//!
//! A [`Pattern`] fixes some entries and groups the remaining positions into
//! variable classes; every position of a class carries the same unknown
//! scalar. For a vector `x` with one entry per class, [`assemble`] builds
//! `Σ(x)`, [`objective`] evaluates
//!
//! * `log|det Σ(x)|` for square patterns, and
//! * `log det (ΣΣᵀ)^{1/2} = ½·log det(ΣΣᵀ)` for wide rectangular ones,
//!
//! and [`gradient`] returns, per class, the sum of the (pseudo)inverse
//! entries at the transposed positions. A point is stationary exactly when
//! those sums vanish, which for untied patterns is the same as the
//! (pseudo)inverse vanishing on the transposed unknown pattern.
//!
//! Tall patterns (`rows > cols`) are transposed on entry ([`normalize_rect`])
//! so the working orientation is always `rows <= cols`. The unknown vector
//! is orientation independent; matrices are transposed back by
//! [`PartialMatrix::to_original`].

mod calculus;
mod pattern;
mod precheck;

pub use calculus::{
    assemble, evaluate, gradient, newton_matrix, objective, residual_report, zero_count,
    zero_threshold, EvalError, Evaluation, ResidualEntry, ResidualReport,
};
pub use pattern::{
    normalize_rect, parse_scalar, Mode, PartialMatrix, Pattern, PatternError, Position,
};
pub use precheck::{structural_precheck, StructuralWarning};
pub(crate) use calculus::newton_matrix_at;

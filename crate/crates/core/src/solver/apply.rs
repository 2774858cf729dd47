use super::solution::Solution;
use crate::densela::{LinalgError, Matrix};
use crate::partialmat::zero_count;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `ΣX = B`, solved as `X = Σ⁻¹B` (or `Σ♯B` for tall `Σ`).
    Left,
    /// `XΣ = B`, solved as `X = BΣ♯`.
    Right,
}

#[derive(Debug, Clone)]
pub struct AppliedCompletion {
    pub x: Matrix,
    /// Vanishing (pseudo)inverse entries the product skips.
    pub exploited_zeros: usize,
}

impl Side {
    /// Check that a completion of shape `sigma` can be applied to `b`.
    pub fn check(self, (n, p): (usize, usize), b: &Matrix) -> Result<(), LinalgError> {
        let err = |msg: String| Err(LinalgError::Dimension(msg));
        match self {
            Self::Left if n < p => err(format!(
                "left application needs a square or tall completion, got {n}x{p}"
            )),
            Self::Left if b.rows() != n => err(format!("B has {} rows, completion has {n}", b.rows())),
            Self::Right if n > p => err(format!(
                "right application needs a square or wide completion, got {n}x{p}"
            )),
            Self::Right if b.cols() != p => err(format!("B has {} columns, completion has {p}", b.cols())),
            _ => Ok(()),
        }
    }
}

pub fn apply_completion(sol: &Solution, b: &Matrix, side: Side) -> Result<AppliedCompletion, LinalgError> {
    side.check(sol.sigma.dims(), b)?;
    let x = match side {
        Side::Left => sol.inv.matmul(b)?,
        Side::Right => b.matmul(&sol.inv)?,
    };
    Ok(AppliedCompletion {
        x,
        exploited_zeros: zero_count(&sol.inv),
    })
}

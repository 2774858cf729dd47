use crate::densela::{sym_eig, Matrix};
use crate::partialmat::zero_count;

/// Structural classification of a completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub symmetric: bool,
    pub toeplitz: bool,
    pub positive_definite: bool,
    /// Entries of the (pseudo)inverse below the zero threshold.
    pub zero_count: usize,
}

pub fn classify(sigma: &Matrix, inv: &Matrix) -> Flags {
    let scale = sigma.max_abs();
    let tol = 1e-8 * scale;
    let (rows, cols) = sigma.dims();

    let symmetric = sigma.is_square()
        && (0..rows).all(|i| (i + 1..cols).all(|j| (sigma[(i, j)] - sigma[(j, i)]).abs() < tol));
    // constant along every diagonal: compare each entry with its up-left neighbour
    let toeplitz = (1..rows).all(|i| (1..cols).all(|j| (sigma[(i, j)] - sigma[(i - 1, j - 1)]).abs() < tol));
    let positive_definite = symmetric
        && sym_eig(sigma)
            .map(|e| e.eigenvalues.iter().all(|&l| l > 1e-10 * scale))
            .unwrap_or(false);

    Flags {
        symmetric,
        toeplitz,
        positive_definite,
        zero_count: zero_count(inv),
    }
}

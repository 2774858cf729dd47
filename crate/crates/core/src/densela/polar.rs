use super::{lu_factor, sym_eig, LinalgError, Matrix, Result, RANK_TOL};

/// Factors of the (generalized) polar decomposition `Σ = P·U`.
///
/// `P = (ΣΣᵀ)^{1/2}` is symmetric positive definite and `U = P⁻¹Σ` has
/// orthonormal rows.
#[derive(Debug, Clone)]
pub struct PolarFactors {
    pub p: Matrix,
    pub u: Matrix,
    /// `P⁻¹`, formed from the same eigendecomposition as `P`.
    pub p_inv: Matrix,
    /// Eigenvalues of `ΣΣᵀ`, ascending.
    pub gram_eigenvalues: Vec<f64>,
}

impl PolarFactors {
    /// `log det P = ½ Σ log λᵢ(ΣΣᵀ)`.
    pub fn log_det_p(&self) -> f64 {
        0.5 * self.gram_eigenvalues.iter().map(|l| l.ln()).sum::<f64>()
    }
}

fn require_wide(sigma: &Matrix, what: &str) -> Result<()> {
    if sigma.rows() > sigma.cols() {
        return Err(LinalgError::Dimension(format!(
            "{what} requires rows <= cols, got {}x{}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    Ok(())
}

pub fn polar(sigma: &Matrix) -> Result<PolarFactors> {
    require_wide(sigma, "polar decomposition")?;
    let eig = sym_eig(&sigma.gram_rows())?;
    let lmax = eig.spectral_scale();
    let lmin = eig.eigenvalues[0];
    if lmin <= RANK_TOL * lmax {
        return Err(LinalgError::RankDeficient {
            min_eigenvalue: lmin,
        });
    }
    let p = eig.map_spectrum(f64::sqrt);
    let p_inv = eig.map_spectrum(|l| 1.0 / l.sqrt());
    let u = &p_inv * sigma;
    Ok(PolarFactors {
        p,
        u,
        p_inv,
        gram_eigenvalues: eig.eigenvalues,
    })
}

/// Right pseudoinverse `Σᵀ(ΣΣᵀ)⁻¹` of a full-row-rank matrix.
pub fn pinv_frr(sigma: &Matrix) -> Result<Matrix> {
    require_wide(sigma, "full-row-rank pseudoinverse")?;
    let gram = sigma.gram_rows();
    let lu = lu_factor(&gram)?;
    if lu.is_singular() {
        let min_eigenvalue = sym_eig(&gram)?.eigenvalues[0];
        return Err(LinalgError::RankDeficient { min_eigenvalue });
    }
    // (ΣΣᵀ)⁻¹Σ, then transpose: the Gram matrix is symmetric
    Ok(lu.solve(sigma)?.transpose())
}

/// Pseudoinverse through the polar factors, `Uᵀ·P⁻¹`.
pub fn pinv_via_polar(sigma: &Matrix) -> Result<Matrix> {
    let f = polar(sigma)?;
    Ok(&f.u.transpose() * &f.p_inv)
}

/// Lower Cholesky factor of a symmetric positive definite matrix.
///
/// Fails with [`LinalgError::NotPositiveDefinite`] at the first non-positive pivot.
pub fn cholesky(s: &Matrix) -> Result<Matrix> {
    if !s.is_square() {
        return Err(LinalgError::Dimension(format!(
            "Cholesky requires a square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let n = s.rows();
    let mut l = Matrix::zeros(n, n);
    for j in 0..n {
        let mut d = s[(j, j)];
        for k in 0..j {
            d -= l[(j, k)] * l[(j, k)];
        }
        if d <= 0.0 || !d.is_finite() {
            return Err(LinalgError::NotPositiveDefinite { pivot: j });
        }
        let d = d.sqrt();
        l[(j, j)] = d;
        for i in j + 1..n {
            let mut v = s[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = v / d;
        }
    }
    Ok(l)
}

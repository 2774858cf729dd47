use super::{LinalgError, Matrix, Result, PIVOT_TOL};

/// Partial-pivoting LU factorization `P·A = L·U`.
///
/// `L` (unit lower) and `U` share one storage matrix. When a pivot falls
/// below `PIVOT_TOL × ‖A‖∞` elimination stops and the pivot index is
/// recorded; the determinant is then reported as exactly zero and solves
/// fail with [`LinalgError::Singular`].
#[derive(Debug, Clone)]
pub struct LuFactorization {
    lu: Matrix,
    perm: Vec<usize>,
    sign: f64,
    singular_at: Option<usize>,
}

pub fn lu_factor(a: &Matrix) -> Result<LuFactorization> {
    if !a.is_square() {
        return Err(LinalgError::Dimension(format!(
            "LU requires a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    let n = a.rows();
    let tol = PIVOT_TOL * a.norm_inf();
    let mut lu = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut sign = 1.0;
    let mut singular_at = None;

    for k in 0..n {
        let (p, pmax) = (k..n)
            .map(|i| (i, lu[(i, k)].abs()))
            .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pmax <= tol {
            singular_at = Some(k);
            break;
        }
        if p != k {
            for j in 0..n {
                let tmp = lu[(k, j)];
                lu[(k, j)] = lu[(p, j)];
                lu[(p, j)] = tmp;
            }
            perm.swap(k, p);
            sign = -sign;
        }
        let pivot = lu[(k, k)];
        for i in k + 1..n {
            let factor = lu[(i, k)] / pivot;
            lu[(i, k)] = factor;
            if factor != 0.0 {
                for j in k + 1..n {
                    lu[(i, j)] -= factor * lu[(k, j)];
                }
            }
        }
    }

    Ok(LuFactorization {
        lu,
        perm,
        sign,
        singular_at,
    })
}

impl LuFactorization {
    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    pub fn is_singular(&self) -> bool {
        self.singular_at.is_some()
    }

    /// Index of the first pivot that fell below the threshold.
    pub fn singular_pivot(&self) -> Option<usize> {
        self.singular_at
    }

    /// Row permutation: row `i` of `P·A` is row `perm[i]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn l(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Less => 0.0,
        })
    }

    pub fn u(&self) -> Matrix {
        let n = self.dim();
        Matrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { 0.0 })
    }

    pub fn det(&self) -> f64 {
        if self.is_singular() {
            return 0.0;
        }
        (0..self.dim()).fold(self.sign, |d, i| d * self.lu[(i, i)])
    }

    /// `log|det A|` and the sign of `det A`, without overflow in the product.
    pub fn log_abs_det(&self) -> Option<(f64, f64)> {
        if self.is_singular() {
            return None;
        }
        let mut sign = self.sign;
        let mut acc = 0.0;
        for i in 0..self.dim() {
            let u = self.lu[(i, i)];
            acc += u.abs().ln();
            if u < 0.0 {
                sign = -sign;
            }
        }
        Some((acc, sign))
    }

    pub fn solve(&self, b: &Matrix) -> Result<Matrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinalgError::Dimension(format!(
                "right-hand side has {} rows, expected {n}",
                b.rows()
            )));
        }
        if let Some(pivot) = self.singular_at {
            return Err(LinalgError::Singular { pivot });
        }
        let m = b.cols();
        let mut x = Matrix::from_fn(n, m, |i, j| b[(self.perm[i], j)]);
        for c in 0..m {
            for i in 0..n {
                let mut s = x[(i, c)];
                for k in 0..i {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s;
            }
            for i in (0..n).rev() {
                let mut s = x[(i, c)];
                for k in i + 1..n {
                    s -= self.lu[(i, k)] * x[(k, c)];
                }
                x[(i, c)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        self.solve(&Matrix::identity(self.dim()))
    }
}

pub fn det(a: &Matrix) -> Result<f64> {
    Ok(lu_factor(a)?.det())
}

pub fn inverse(a: &Matrix) -> Result<Matrix> {
    lu_factor(a)?.inverse()
}

pub fn solve(a: &Matrix, b: &Matrix) -> Result<Matrix> {
    lu_factor(a)?.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_factorization() {
        let f = lu_factor(&Matrix::identity(3)).unwrap();
        assert_eq!(f.l(), Matrix::identity(3));
        assert_eq!(f.u(), Matrix::identity(3));
        assert_eq!(f.sign(), 1.0);
        assert_eq!(f.det(), 1.0);
    }

    #[test]
    fn permutation_swap() {
        let a = Matrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let f = lu_factor(&a).unwrap();
        assert_eq!(f.sign(), -1.0);
        assert_eq!(f.permutation(), &[1, 0]);
        assert_eq!(f.det(), -1.0);
    }

    #[test]
    fn reconstructs_input() {
        let a = Matrix::from_rows(&[
            vec![2.0, -1.0, 0.5],
            vec![4.0, 3.0, -2.0],
            vec![-1.0, 7.0, 1.0],
        ])
        .unwrap();
        let f = lu_factor(&a).unwrap();
        let lu = &f.l() * &f.u();
        let pa = Matrix::from_fn(3, 3, |i, j| a[(f.permutation()[i], j)]);
        assert!(lu.max_abs_diff(&pa) <= 1e-12 * a.max_abs());
    }

    #[test]
    fn diagonal_det_and_solve() {
        assert_eq!(det(&Matrix::from_diag(&[2.0, 3.0])).unwrap(), 6.0);
        let x = solve(&Matrix::from_diag(&[2.0, 4.0]), &Matrix::column(&[2.0, 8.0])).unwrap();
        assert_eq!(x, Matrix::column(&[1.0, 2.0]));
    }

    #[test]
    fn singular_and_nonsquare_inputs() {
        let s = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 4.0]]).unwrap();
        let f = lu_factor(&s).unwrap();
        assert!(f.is_singular());
        assert_eq!(f.det(), 0.0);
        assert_eq!(inverse(&s), Err(LinalgError::Singular { pivot: 1 }));
        assert!(matches!(
            lu_factor(&Matrix::zeros(2, 3)),
            Err(LinalgError::Dimension(_))
        ));
        assert!(matches!(det(&Matrix::zeros(1, 2)), Err(LinalgError::Dimension(_))));
        assert!(lu_factor(&Matrix::zeros(2, 2)).unwrap().is_singular());
    }

    #[test]
    fn log_abs_det_matches_det() {
        let a = Matrix::from_rows(&[vec![1.0, 2.0], vec![3.0, 1.0]]).unwrap();
        let f = lu_factor(&a).unwrap();
        let (l, s) = f.log_abs_det().unwrap();
        assert!((s * l.exp() - f.det()).abs() < 1e-14);
        assert_eq!(s, -1.0);
    }
}

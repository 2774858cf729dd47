//! Brute-force checks that do not share the analytic code path.
//!
//! Central finite differences of the objective, the determinant along one
//! class recovered by polynomial interpolation, real polynomial roots
//! through the companion matrix, and the Moore–Penrose identities.

use thiserror::Error;

use crate::densela::{det, solve, sym_eig, LinalgError, Matrix};
use crate::partialmat::{assemble, objective, EvalError, Mode, PartialMatrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("objective undefined at probe of coordinate {coordinate}: {source}")]
    Probe { coordinate: usize, source: EvalError },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Central differences `(J(x + h_c e_c) − J(x − h_c e_c)) / 2h_c` with
/// `h_c = h·(1 + |x_c|)`.
pub fn fd_gradient(pm: &PartialMatrix, x: &[f64], h: f64) -> Result<Vec<f64>, OracleError> {
    let mut probe = x.to_vec();
    let mut out = Vec::with_capacity(x.len());
    for c in 0..x.len() {
        let step = h * (1.0 + x[c].abs());
        let mut at = |v: f64| {
            probe[c] = v;
            let r = objective(pm, &probe);
            probe[c] = x[c];
            r.map_err(|source| OracleError::Probe {
                coordinate: c,
                source,
            })
        };
        let plus = at(x[c] + step)?;
        let minus = at(x[c] - step)?;
        out.push((plus - minus) / (2.0 * step));
    }
    Ok(out)
}

/// `‖a − b‖∞ / max(‖a‖∞, ‖b‖∞)`, zero when both vanish.
pub fn rel_error(a: &[f64], b: &[f64]) -> f64 {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let diff = a.iter().zip(b).fold(0.0f64, |m, (p, q)| m.max((p - q).abs()));
    let scale = inf(a).max(inf(b));
    if scale == 0.0 {
        0.0
    } else {
        diff / scale
    }
}

/// `σ_min / σ_max` of a matrix with `rows <= cols` (0 when rank deficient).
pub fn reciprocal_condition(sigma: &Matrix) -> f64 {
    let wide = if sigma.rows() <= sigma.cols() {
        sigma.clone()
    } else {
        sigma.transpose()
    };
    match sym_eig(&wide.gram_rows()) {
        Ok(e) => {
            let lo = e.eigenvalues[0].max(0.0);
            let hi = e.spectral_scale();
            if hi == 0.0 {
                0.0
            } else {
                (lo / hi).sqrt()
            }
        }
        Err(_) => 0.0,
    }
}

/// Univariate polynomial, coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyCoeffs {
    coeffs: Vec<f64>,
}

impl PolyCoeffs {
    /// Drops trailing coefficients below `1e-12 × max|c|`.
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        let scale = coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.abs() <= 1e-12 * scale) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative(&self) -> PolyCoeffs {
        if self.coeffs.len() <= 1 {
            return PolyCoeffs::new(vec![0.0]);
        }
        PolyCoeffs::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| i as f64 * c)
                .collect(),
        )
    }
}

/// `det Σ(x)` as a polynomial in `x_c`, other unknowns frozen at `x`.
///
/// Interpolates at the nodes `0, 1, …, |class c|` through the Vandermonde
/// system.
pub fn det_poly_along_class(pm: &PartialMatrix, x: &[f64], class: usize) -> Result<PolyCoeffs, OracleError> {
    if pm.mode() != Mode::Square {
        return Err(OracleError::Domain("determinant polynomial needs a square pattern".into()));
    }
    let size = pm
        .pattern()
        .classes()
        .get(class)
        .ok_or_else(|| OracleError::Domain(format!("no class {class}")))?
        .len();
    let nodes: Vec<f64> = (0..=size).map(|i| i as f64).collect();
    let mut probe = x.to_vec();
    let mut values = Vec::with_capacity(nodes.len());
    for &t in &nodes {
        probe[class] = t;
        values.push(det(&assemble(pm, &probe)?)?);
    }
    let vander = Matrix::from_fn(nodes.len(), nodes.len(), |i, j| nodes[i].powi(j as i32));
    let coeffs = solve(&vander, &Matrix::column(&values))?;
    Ok(PolyCoeffs::new(coeffs.as_slice().to_vec()))
}

/// Real roots, ascending.
///
/// Degrees 1 and 2 are solved in closed form; higher degrees through the
/// eigenvalues of the companion matrix (shifted Hessenberg QR), with each
/// accepted real root polished by Newton on the polynomial. A complex
/// eigenvalue counts as real when `|Im z| <= 1e-8·(1 + |z|)`.
pub fn real_roots(p: &PolyCoeffs) -> Result<Vec<f64>, OracleError> {
    let c = p.coeffs();
    let d = p.degree();
    if d == 0 {
        return Err(OracleError::Domain("polynomial of degree 0 has no isolated roots".into()));
    }
    let accept = |re: f64, im: f64| im.abs() <= 1e-8 * (1.0 + re.hypot(im));
    let mut roots = match d {
        1 => vec![-c[0] / c[1]],
        2 => {
            let (a, b, cc) = (c[2], c[1], c[0]);
            let disc = b * b - 4.0 * a * cc;
            if disc >= 0.0 {
                // cancellation-free pair
                let q = -0.5 * (b + b.signum() * disc.sqrt());
                if q == 0.0 {
                    vec![0.0, 0.0]
                } else {
                    vec![q / a, cc / q]
                }
            } else {
                let re = -b / (2.0 * a);
                let im = (-disc).sqrt() / (2.0 * a.abs());
                if accept(re, im) {
                    vec![re, re]
                } else {
                    Vec::new()
                }
            }
        }
        _ => {
            let lead = c[d];
            let companion = Matrix::from_fn(d, d, |i, j| {
                if i == 0 {
                    -c[d - 1 - j] / lead
                } else if i == j + 1 {
                    1.0
                } else {
                    0.0
                }
            });
            let eig = hessenberg_eigenvalues(&companion)
                .ok_or_else(|| OracleError::Domain("companion QR iteration did not converge".into()))?;
            let dp = p.derivative();
            eig.into_iter()
                .filter(|&(re, im)| accept(re, im))
                .map(|(re, _)| polish(p, &dp, re))
                .collect()
        }
    };
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn polish(p: &PolyCoeffs, dp: &PolyCoeffs, mut x: f64) -> f64 {
    for _ in 0..8 {
        let fx = p.eval(x);
        let dx = dp.eval(x);
        if dx == 0.0 || fx == 0.0 {
            break;
        }
        let next = x - fx / dx;
        if !next.is_finite() || p.eval(next).abs() >= fx.abs() {
            break;
        }
        x = next;
    }
    x
}

/// Eigenvalues `(re, im)` of an upper Hessenberg matrix by the shifted
/// double-step QR iteration.
fn hessenberg_eigenvalues(h: &Matrix) -> Option<Vec<(f64, f64)>> {
    let n = h.rows();
    // 1-based working copy keeps the index arithmetic readable
    let mut a = vec![vec![0.0f64; n + 1]; n + 1];
    for i in 0..n {
        for j in 0..n {
            a[i + 1][j + 1] = h[(i, j)];
        }
    }
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    for i in 1..=n {
        for j in (i.max(2) - 1)..=n {
            anorm += a[i][j].abs();
        }
    }

    let mut nn = n as isize;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let nu = nn as usize;
            let mut l = nu;
            while l >= 2 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[nu][nu];
            if l == nu {
                wr[nu] = x + t;
                wi[nu] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[nu - 1][nu - 1];
                let mut w = a[nu][nu - 1] * a[nu - 1][nu];
                if l == nu - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + if p >= 0.0 { z.abs() } else { -z.abs() };
                        wr[nu - 1] = x + z;
                        wr[nu] = x + z;
                        if z != 0.0 {
                            wr[nu] = x - w / z;
                        }
                        wi[nu - 1] = 0.0;
                        wi[nu] = 0.0;
                    } else {
                        wr[nu - 1] = x + p;
                        wr[nu] = x + p;
                        wi[nu - 1] = -z;
                        wi[nu] = z;
                    }
                    nn -= 2;
                } else {
                    if its == 60 {
                        return None;
                    }
                    if its == 10 || its == 20 {
                        // exceptional shift
                        t += x;
                        for i in 1..=nu {
                            a[i][i] -= x;
                        }
                        let s = a[nu][nu - 1].abs() + a[nu - 1][nu - 2].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r, mut z);
                    let mut m = nu - 2;
                    loop {
                        z = a[m][m];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                        q = a[m + 1][m + 1] - z - rr - ss;
                        r = a[m + 2][m + 1];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[m][m - 1].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                        if u + v == v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nu {
                        a[i][i - 2] = 0.0;
                        if i != m + 2 {
                            a[i][i - 3] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k < nu {
                        if k != m {
                            p = a[k][k - 1];
                            q = a[k + 1][k - 1];
                            r = 0.0;
                            if k != nu - 1 {
                                r = a[k + 2][k - 1];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let norm = (p * p + q * q + r * r).sqrt();
                        let s = if p >= 0.0 { norm } else { -norm };
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[k][k - 1] = -a[k][k - 1];
                                }
                            } else {
                                a[k][k - 1] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nu {
                                let mut pp = a[k][j] + q * a[k + 1][j];
                                if k != nu - 1 {
                                    pp += r * a[k + 2][j];
                                    a[k + 2][j] -= pp * z;
                                }
                                a[k + 1][j] -= pp * y;
                                a[k][j] -= pp * x;
                            }
                            let mmin = nu.min(k + 3);
                            for i in l..=mmin {
                                let mut pp = x * a[i][k] + y * a[i][k + 1];
                                if k != nu - 1 {
                                    pp += z * a[i][k + 2];
                                    a[i][k + 2] -= pp * r;
                                }
                                a[i][k + 1] -= pp * q;
                                a[i][k] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if !((l as isize) < nn - 1) {
                break;
            }
        }
    }
    Some((1..=n).map(|i| (wr[i], wi[i])).collect())
}

/// Largest violation of `ΣΣ♯Σ = Σ`, `Σ♯ΣΣ♯ = Σ♯`, `(ΣΣ♯)ᵀ = ΣΣ♯`,
/// `(Σ♯Σ)ᵀ = Σ♯Σ` and `ΣΣ♯ = I`.
pub fn mp_axiom_check(sigma: &Matrix, pinv: &Matrix) -> Result<f64, LinalgError> {
    if pinv.dims() != (sigma.cols(), sigma.rows()) {
        return Err(LinalgError::Dimension(format!(
            "pseudoinverse of a {}x{} matrix must be {}x{}, got {}x{}",
            sigma.rows(),
            sigma.cols(),
            sigma.cols(),
            sigma.rows(),
            pinv.rows(),
            pinv.cols()
        )));
    }
    let ss = sigma.matmul(pinv)?;
    let ps = pinv.matmul(sigma)?;
    let violations = [
        ss.matmul(sigma)?.max_abs_diff(sigma),
        ps.matmul(pinv)?.max_abs_diff(pinv),
        ss.transpose().max_abs_diff(&ss),
        ps.transpose().max_abs_diff(&ps),
        ss.max_abs_diff(&Matrix::identity(sigma.rows())),
    ];
    Ok(violations.into_iter().fold(0.0, f64::max))
}

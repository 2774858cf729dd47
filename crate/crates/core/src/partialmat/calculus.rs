use thiserror::Error;

use super::pattern::{Mode, PartialMatrix, Position};
use crate::densela::{lu_factor, pinv_frr, LinalgError, Matrix};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("expected {expected} unknowns, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("unknown {0} is not finite")]
    NonFinite(usize),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Everything computed at one point `x`, in working orientation.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub sigma: Matrix,
    /// `Σ⁻¹` (square) or `Σ♯ = Σᵀ(ΣΣᵀ)⁻¹` (rectangular).
    pub inv: Matrix,
    pub objective: f64,
    pub gradient: Vec<f64>,
    /// Hadamard ratio `|det Σ| / Πᵢ‖rowᵢ‖` in `(0, 1]`; for rectangular
    /// matrices the same ratio on `ΣΣᵀ`, square-rooted.
    pub volume_ratio: f64,
}

impl Evaluation {
    pub fn grad_norm(&self) -> f64 {
        self.gradient.iter().fold(0.0, |m, g| m.max(g.abs()))
    }
}

fn check_x(pm: &PartialMatrix, x: &[f64]) -> Result<(), EvalError> {
    if x.len() != pm.k() {
        return Err(EvalError::LengthMismatch {
            expected: pm.k(),
            got: x.len(),
        });
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(EvalError::NonFinite(i));
    }
    Ok(())
}

/// `Σ(x)` in working orientation.
pub fn assemble(pm: &PartialMatrix, x: &[f64]) -> Result<Matrix, EvalError> {
    check_x(pm, x)?;
    let p = pm.pattern();
    let mut m = Matrix::zeros(p.rows(), p.cols());
    for (&pos, &v) in p.specified() {
        m[pos] = v;
    }
    for (c, pos) in p.unknown_positions() {
        m[pos] = x[c];
    }
    Ok(m)
}

fn log_row_norms(m: &Matrix) -> f64 {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(|v| v * v).sum::<f64>().sqrt().ln())
        .sum()
}

/// Per-class sums of `inv[(j, i)]` over the class positions `(i, j)`.
fn class_sums(pm: &PartialMatrix, inv: &Matrix) -> Vec<f64> {
    pm.pattern()
        .classes()
        .iter()
        .map(|class| class.iter().map(|&(i, j)| inv[(j, i)]).sum())
        .collect()
}

pub fn evaluate(pm: &PartialMatrix, x: &[f64]) -> Result<Evaluation, EvalError> {
    let sigma = assemble(pm, x)?;
    let (inv, objective) = match pm.mode() {
        Mode::Square => {
            let lu = lu_factor(&sigma)?;
            let (log_abs_det, _) = lu.log_abs_det().ok_or(LinalgError::Singular {
                pivot: lu.singular_pivot().unwrap_or(0),
            })?;
            (lu.inverse()?, log_abs_det)
        }
        Mode::Rectangular => {
            let inv = pinv_frr(&sigma)?;
            let lu = lu_factor(&sigma.gram_rows())?;
            let (log_det, _) = lu.log_abs_det().ok_or(LinalgError::RankDeficient {
                min_eigenvalue: 0.0,
            })?;
            (inv, 0.5 * log_det)
        }
    };
    if !inv.is_finite() || !objective.is_finite() {
        return Err(LinalgError::Singular { pivot: 0 }.into());
    }
    let volume_ratio = (objective - log_row_norms(&sigma)).exp();
    let gradient = class_sums(pm, &inv);
    Ok(Evaluation {
        sigma,
        inv,
        objective,
        gradient,
        volume_ratio,
    })
}

/// `log|det Σ(x)|`, or `½ log det(Σ(x)Σ(x)ᵀ)` for rectangular patterns.
pub fn objective(pm: &PartialMatrix, x: &[f64]) -> Result<f64, EvalError> {
    Ok(evaluate(pm, x)?.objective)
}

/// Analytic gradient: for class `c`, `Σ_{(i,j)∈c} [Σ⁻¹]_{j,i}` (or `[Σ♯]_{j,i}`).
pub fn gradient(pm: &PartialMatrix, x: &[f64]) -> Result<Vec<f64>, EvalError> {
    Ok(evaluate(pm, x)?.gradient)
}

/// Cutoff below which a (pseudo)inverse entry counts as vanishing.
pub fn zero_threshold(inv: &Matrix) -> f64 {
    1e-9 * (1.0 + inv.norm_inf())
}

pub fn zero_count(inv: &Matrix) -> usize {
    let t = zero_threshold(inv);
    inv.as_slice().iter().filter(|v| v.abs() < t).count()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualEntry {
    pub class: usize,
    /// Unknown position in the caller's orientation, 0-based.
    pub position: Position,
    /// (Pseudo)inverse entry at the transposed position.
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResidualReport {
    pub entries: Vec<ResidualEntry>,
    pub zero_count: usize,
    pub zero_threshold: f64,
}

impl ResidualReport {
    pub fn from_evaluation(pm: &PartialMatrix, eval: &Evaluation) -> Self {
        let entries = pm
            .pattern()
            .unknown_positions()
            .map(|(class, (i, j))| ResidualEntry {
                class,
                position: pm.to_original_position((i, j)),
                value: eval.inv[(j, i)],
            })
            .collect();
        Self {
            entries,
            zero_count: zero_count(&eval.inv),
            zero_threshold: zero_threshold(&eval.inv),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.value.abs()))
    }
}

pub fn residual_report(pm: &PartialMatrix, x: &[f64]) -> Result<ResidualReport, EvalError> {
    Ok(ResidualReport::from_evaluation(pm, &evaluate(pm, x)?))
}

/// Jacobian of the gradient (Hessian of the objective), `k×k`.
///
/// Square patterns use `d[Σ⁻¹] = −Σ⁻¹ dΣ Σ⁻¹`; rectangular patterns use
/// central differences of the analytic gradient, symmetrized.
pub fn newton_matrix(pm: &PartialMatrix, x: &[f64]) -> Result<Matrix, EvalError> {
    let eval = evaluate(pm, x)?;
    newton_matrix_at(pm, x, &eval)
}

pub(crate) fn newton_matrix_at(
    pm: &PartialMatrix,
    x: &[f64],
    eval: &Evaluation,
) -> Result<Matrix, EvalError> {
    let k = pm.k();
    if k == 0 {
        return Err(LinalgError::Dimension("no unknowns".into()).into());
    }
    let classes = pm.pattern().classes();
    match pm.mode() {
        Mode::Square => {
            let inv = &eval.inv;
            let mut h = Matrix::zeros(k, k);
            for (c, ci) in classes.iter().enumerate() {
                for (d, cd) in classes.iter().enumerate().skip(c) {
                    let mut s = 0.0;
                    for &(i, j) in ci {
                        for &(l, m) in cd {
                            s += inv[(j, l)] * inv[(m, i)];
                        }
                    }
                    h[(c, d)] = -s;
                    h[(d, c)] = -s;
                }
            }
            Ok(h)
        }
        Mode::Rectangular => {
            let mut h = Matrix::zeros(k, k);
            let mut probe = x.to_vec();
            for c in 0..k {
                let step = 1e-6 * (1.0 + x[c].abs());
                probe[c] = x[c] + step;
                let gp = gradient(pm, &probe)?;
                probe[c] = x[c] - step;
                let gm = gradient(pm, &probe)?;
                probe[c] = x[c];
                for r in 0..k {
                    h[(r, c)] = (gp[r] - gm[r]) / (2.0 * step);
                }
            }
            Ok(h.symmetrized())
        }
    }
}

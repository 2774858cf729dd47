use std::fmt;

use super::config::SolverConfig;
use super::multistart::{draw_point, multistart, start_rng};
use super::newton::is_stationary;
use super::solution::{Provenance, Solution};
use crate::densela::{inverse, lu_factor, pinv_frr, Matrix};
use crate::partialmat::{evaluate, EvalError, Mode, PartialMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DualFailure {
    /// Duals are defined per position; tied classes are not supported.
    TiedPattern,
    InvalidParameters,
    SingularIterate,
    MaxIters,
    StepUnderflow,
}

impl fmt::Display for DualFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::TiedPattern => "tied-pattern",
            Self::InvalidParameters => "invalid-parameters",
            Self::SingularIterate => "singular-iterate",
            Self::MaxIters => "max-iters",
            Self::StepUnderflow => "step-underflow",
        })
    }
}

impl std::error::Error for DualFailure {}

/// Multipliers `λᵢⱼ`, one per specified position in the working
/// orientation, in the pattern's position order. `λᵢⱼ` sits at `(j, i)` of
/// the candidate (pseudo)inverse `Λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct DualParameters {
    pub values: Vec<f64>,
}

impl DualParameters {
    /// Mask the (pseudo)inverse of a completion (given in the caller's
    /// orientation) to the transposed specified set.
    pub fn from_completion(pm: &PartialMatrix, sigma: &Matrix) -> Result<Self, EvalError> {
        // transposition is its own inverse
        let working = pm.to_original(sigma);
        let inv = match pm.mode() {
            Mode::Square => inverse(&working)?,
            Mode::Rectangular => pinv_frr(&working)?,
        };
        Ok(Self {
            values: pm.pattern().specified().keys().map(|&(i, j)| inv[(j, i)]).collect(),
        })
    }

    /// `Λ = Σ λᵢⱼ eⱼeᵢᵀ`, `cols × rows` in working orientation.
    pub fn to_matrix(&self, pm: &PartialMatrix) -> Matrix {
        let p = pm.pattern();
        let mut lambda = Matrix::zeros(p.cols(), p.rows());
        for (&(i, j), &v) in p.specified().keys().zip(&self.values) {
            lambda[(j, i)] = v;
        }
        lambda
    }
}

#[derive(Debug, Clone, Default)]
pub enum DualInit {
    Parameters(DualParameters),
    /// Masked inverse of the best multistart solution, else seeded random
    /// multipliers.
    #[default]
    Auto,
}

/// `Λ⁻¹`, or `Λ♯ = (ΛᵀΛ)⁻¹Λᵀ` for the tall rectangular case.
fn primal_of(pm: &PartialMatrix, lambda: &Matrix) -> Option<Matrix> {
    let m = match pm.mode() {
        Mode::Square => inverse(lambda).ok()?,
        Mode::Rectangular => pinv_frr(&lambda.transpose()).ok()?.transpose(),
    };
    m.is_finite().then_some(m)
}

fn matching_residual(pm: &PartialMatrix, primal: &Matrix) -> Vec<f64> {
    pm.pattern()
        .specified()
        .iter()
        .map(|(&pos, &v)| primal[pos] - v)
        .collect()
}

/// Jacobian of the matching residual with respect to the multipliers.
fn jacobian(pm: &PartialMatrix, lambda: &Matrix, primal: &Matrix) -> Option<Matrix> {
    let positions: Vec<_> = pm.pattern().specified().keys().copied().collect();
    let m = positions.len();
    let mut jac = Matrix::zeros(m, m);
    // rectangular extra term: (ΛᵀΛ)⁻¹ dΛᵀ (I − ΛΛ♯)
    let extra = match pm.mode() {
        Mode::Square => None,
        Mode::Rectangular => {
            let gram_inv = inverse(&(&lambda.transpose() * lambda)).ok()?;
            let p = lambda.rows();
            let proj = &Matrix::identity(p) - &(lambda * primal);
            Some((gram_inv, proj))
        }
    };
    for (c, &(l, mm)) in positions.iter().enumerate() {
        // λ_lm perturbs Λ at (mm, l)
        for (r, &(i, j)) in positions.iter().enumerate() {
            let mut d = -primal[(i, mm)] * primal[(l, j)];
            if let Some((gi, proj)) = &extra {
                d += gi[(i, l)] * proj[(mm, j)];
            }
            jac[(r, c)] = d;
        }
    }
    Some(jac)
}

fn solve_from(
    pm: &PartialMatrix,
    cfg: &SolverConfig,
    init: &DualParameters,
) -> Result<Solution, DualFailure> {
    let m = pm.pattern().specified().len();
    if init.values.len() != m || init.values.iter().any(|v| !v.is_finite()) {
        return Err(DualFailure::InvalidParameters);
    }
    let sum_sq = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>();
    let g_tol = cfg.grad_tol * (1.0 + pm.pattern().max_abs_specified());

    let mut params = init.clone();
    let mut lambda = params.to_matrix(pm);
    let mut primal = primal_of(pm, &lambda).ok_or(DualFailure::SingularIterate)?;
    let mut resid = matching_residual(pm, &primal);

    for iter in 0..=cfg.max_iters {
        let r_norm = resid.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if r_norm <= g_tol {
            let x: Vec<f64> = pm
                .pattern()
                .classes()
                .iter()
                .map(|class| primal[class[0]])
                .collect();
            if let Ok(eval) = evaluate(pm, &x) {
                if is_stationary(&eval, cfg.grad_tol) {
                    return Ok(Solution::from_evaluation(
                        pm,
                        x,
                        &eval,
                        Provenance {
                            start: None,
                            iterations: iter,
                        },
                    ));
                }
            }
        }
        if iter == cfg.max_iters {
            break;
        }
        let jac = jacobian(pm, &lambda, &primal).ok_or(DualFailure::SingularIterate)?;
        let lu = lu_factor(&jac).expect("square Jacobian");
        let rhs = Matrix::column(&resid.iter().map(|v| -v).collect::<Vec<_>>());
        let step = lu.solve(&rhs).map_err(|_| DualFailure::SingularIterate)?;
        let step = step.as_slice();

        let current = sum_sq(&resid);
        let mut t = 1.0;
        loop {
            if t < cfg.min_step {
                return Err(DualFailure::StepUnderflow);
            }
            let cand = DualParameters {
                values: params.values.iter().zip(step).map(|(v, d)| v + t * d).collect(),
            };
            let cand_lambda = cand.to_matrix(pm);
            if let Some(cand_primal) = primal_of(pm, &cand_lambda) {
                let cand_resid = matching_residual(pm, &cand_primal);
                if sum_sq(&cand_resid) < current {
                    params = cand;
                    lambda = cand_lambda;
                    primal = cand_primal;
                    resid = cand_resid;
                    break;
                }
            }
            t *= cfg.contraction;
        }
    }
    Err(DualFailure::MaxIters)
}

/// Solve the matching conditions `[Λ⁻¹]ᵢⱼ = σᵢⱼ` (or `[Λ♯]ᵢⱼ`) over the
/// specified set for multipliers supported on its transpose.
///
/// Converges when the matching residual is below `grad_tol·(1 + max|σ|)`
/// and the completion read off `Λ⁻¹` is stationary to `grad_tol`. The
/// result is reported in the same x-space as [`super::newton`].
pub fn dual_solve(pm: &PartialMatrix, cfg: &SolverConfig, init: DualInit) -> Result<Solution, DualFailure> {
    if !pm.pattern().is_untied() {
        return Err(DualFailure::TiedPattern);
    }
    match init {
        DualInit::Parameters(p) => solve_from(pm, cfg, &p),
        DualInit::Auto => {
            let best = multistart(pm, cfg).solutions.into_iter().next();
            if let Some(sol) = best {
                if let Ok(p) = DualParameters::from_completion(pm, &sol.sigma) {
                    if let Ok(s) = solve_from(pm, cfg, &p) {
                        return Ok(s);
                    }
                }
            }
            let m = pm.pattern().specified().len();
            let range = 1.0 / (1.0 + pm.pattern().max_abs_specified());
            let mut last = DualFailure::SingularIterate;
            for s in 0..cfg.starts {
                let values = draw_point(&mut start_rng(cfg.seed ^ 0xd0a1, s), m, range);
                match solve_from(pm, cfg, &DualParameters { values }) {
                    Ok(sol) => return Ok(sol),
                    Err(e) => last = e,
                }
            }
            Err(last)
        }
    }
}

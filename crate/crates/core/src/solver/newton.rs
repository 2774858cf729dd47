use std::fmt;

use super::config::SolverConfig;
use super::solution::{Provenance, Solution};
use crate::densela::{lu_factor, Matrix};
use crate::partialmat::{evaluate, newton_matrix_at, Evaluation, Mode, PartialMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NewtonFailure {
    /// `x0` has the wrong length or non-finite entries.
    InvalidStart,
    SingularStart,
    SingularNewtonMatrix,
    MaxIters,
    StepUnderflow,
}

impl NewtonFailure {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::InvalidStart => "invalid-start",
            Self::SingularStart => "singular-start",
            Self::SingularNewtonMatrix => "singular-newton-matrix",
            Self::MaxIters => "max-iters",
            Self::StepUnderflow => "step-underflow",
        }
    }
}

impl fmt::Display for NewtonFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::error::Error for NewtonFailure {}

pub(crate) struct NewtonRun {
    pub x: Vec<f64>,
    pub eval: Evaluation,
    pub iterations: usize,
    /// Objective at the start and after every accepted step.
    pub objectives: Vec<f64>,
}

fn sum_sq(g: &[f64]) -> f64 {
    g.iter().map(|v| v * v).sum()
}

/// `‖∇J‖∞·max(1, max|Σᵢⱼ|) < tol`.
///
/// The gradient carries inverse units of `Σ`; the scale factor keeps
/// points escaping to infinity (where `∇J → 0`) from counting as stationary.
pub(crate) fn is_stationary(eval: &Evaluation, tol: f64) -> bool {
    eval.grad_norm() * eval.sigma.max_abs().max(1.0) < tol
}

/// Newton iteration on `∇J = 0` with backtracking.
///
/// Steps solve `(H + w·∇J∇Jᵀ)·d = −∇J` with `H` the Hessian of `J`;
/// `w = 0` is plain Newton on `∇J`. `admissible` screens the start and
/// every candidate; `accept` decides whether a candidate improves on the
/// current iterate.
pub(crate) fn damped_newton(
    pm: &PartialMatrix,
    x0: &[f64],
    cfg: &SolverConfig,
    outer_weight: f64,
    admissible: impl Fn(&Evaluation) -> bool,
    accept: impl Fn(&Evaluation, &Evaluation) -> bool,
) -> Result<NewtonRun, NewtonFailure> {
    if x0.len() != pm.k() || x0.iter().any(|v| !v.is_finite()) {
        return Err(NewtonFailure::InvalidStart);
    }
    let mut x = x0.to_vec();
    let mut eval = match evaluate(pm, &x) {
        Ok(e) if admissible(&e) => e,
        _ => return Err(NewtonFailure::SingularStart),
    };
    let mut objectives = vec![eval.objective];

    for iter in 0..=cfg.max_iters {
        if is_stationary(&eval, cfg.grad_tol) {
            return Ok(NewtonRun {
                x,
                eval,
                iterations: iter,
                objectives,
            });
        }
        if iter == cfg.max_iters {
            break;
        }
        let mut h = newton_matrix_at(pm, &x, &eval).map_err(|_| NewtonFailure::SingularStart)?;
        if outer_weight != 0.0 {
            let g = &eval.gradient;
            for r in 0..h.rows() {
                for c in 0..h.cols() {
                    h[(r, c)] += outer_weight * g[r] * g[c];
                }
            }
        }
        let lu = lu_factor(&h).expect("Newton matrix is square");
        if lu.is_singular() {
            return Err(NewtonFailure::SingularNewtonMatrix);
        }
        let rhs = Matrix::column(&eval.gradient.iter().map(|g| -g).collect::<Vec<_>>());
        let step = lu
            .solve(&rhs)
            .map_err(|_| NewtonFailure::SingularNewtonMatrix)?;
        let step = step.as_slice();
        if step.iter().any(|v| !v.is_finite()) {
            return Err(NewtonFailure::SingularNewtonMatrix);
        }

        let mut t = 1.0;
        loop {
            if t < cfg.min_step {
                return Err(NewtonFailure::StepUnderflow);
            }
            let cand: Vec<f64> = x.iter().zip(step).map(|(xi, di)| xi + t * di).collect();
            if let Ok(ce) = evaluate(pm, &cand) {
                if admissible(&ce) && accept(&eval, &ce) {
                    x = cand;
                    eval = ce;
                    objectives.push(eval.objective);
                    break;
                }
            }
            t *= cfg.contraction;
        }
    }
    Err(NewtonFailure::MaxIters)
}

/// Damped Newton from `x0` to a stationary point of the objective.
///
/// The iteration runs on `∇q = 0` for `q = exp(αJ)`, i.e. `|det Σ|`
/// (`α = 1`) or `det ΣΣᵀ` (`α = 2`). Off the singular set the two systems
/// have the same roots, but `q` is polynomial in `x`: its Newton step
/// `(H + α∇J∇Jᵀ)·d = −∇J` does not drift to infinity the way Newton on
/// `∇J` does. The step length is halved until the candidate keeps its
/// Hadamard ratio above `singular_guard` and reduces `‖∇q‖²`.
pub fn newton(pm: &PartialMatrix, x0: &[f64], cfg: &SolverConfig) -> Result<Solution, NewtonFailure> {
    newton_from(pm, x0, cfg, None)
}

pub(crate) fn newton_from(
    pm: &PartialMatrix,
    x0: &[f64],
    cfg: &SolverConfig,
    start: Option<usize>,
) -> Result<Solution, NewtonFailure> {
    let guard = cfg.singular_guard;
    let alpha = match pm.mode() {
        Mode::Square => 1.0,
        Mode::Rectangular => 2.0,
    };
    let log_merit = |e: &Evaluation| 2.0 * alpha * e.objective + sum_sq(&e.gradient).ln();
    let run = damped_newton(
        pm,
        x0,
        cfg,
        alpha,
        |e| e.volume_ratio > guard,
        // ‖∇q‖² = α²q²‖∇J‖², compared in logs
        |cur, cand| log_merit(cand) < log_merit(cur),
    )?;
    Ok(Solution::from_evaluation(
        pm,
        run.x,
        &run.eval,
        Provenance {
            start,
            iterations: run.iterations,
        },
    ))
}

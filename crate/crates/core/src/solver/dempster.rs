use std::f64::consts::PI;

use thiserror::Error;

use super::config::SolverConfig;
use super::multistart::{draw_point, start_rng};
use super::newton::{damped_newton, NewtonFailure};
use super::solution::{Provenance, Solution};
use crate::densela::{cholesky, LinalgError, Matrix};
use crate::partialmat::{assemble, evaluate, Mode, PartialMatrix};

/// Number of random draws tried when the zero completion is not PD.
const PD_START_DRAWS: usize = 1000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DempsterError {
    #[error("pattern is not symmetric (values must mirror and classes must be mirrored pairs or diagonal singletons)")]
    PatternNotSymmetric,
    #[error("no positive definite starting completion found")]
    NoPdStart,
    #[error("Newton iteration failed: {0}")]
    Newton(NewtonFailure),
}

#[derive(Debug, Clone)]
pub struct DempsterSolution {
    pub solution: Solution,
    /// Gaussian differential entropy of the completion.
    pub entropy: f64,
    /// `log det Σ` at the start and after every accepted step.
    pub log_det_trace: Vec<f64>,
}

fn log_det_spd(sigma: &Matrix) -> Result<f64, LinalgError> {
    let l = cholesky(sigma)?;
    Ok(2.0 * (0..l.rows()).map(|i| l[(i, i)].ln()).sum::<f64>())
}

/// `H = ½ log det Σ + (n/2)(1 + log 2π)` for symmetric positive definite `Σ`.
pub fn entropy(sigma: &Matrix) -> Result<f64, LinalgError> {
    if !sigma.is_square() {
        return Err(LinalgError::Dimension(format!(
            "entropy requires a square matrix, got {}x{}",
            sigma.rows(),
            sigma.cols()
        )));
    }
    let n = sigma.rows();
    let tol = 1e-8 * sigma.max_abs();
    for i in 0..n {
        for j in i + 1..n {
            if (sigma[(i, j)] - sigma[(j, i)]).abs() > tol {
                return Err(LinalgError::NotPositiveDefinite { pivot: i });
            }
        }
    }
    let log_det = log_det_spd(sigma)?;
    Ok(0.5 * log_det + 0.5 * n as f64 * (1.0 + (2.0 * PI).ln()))
}

/// Per-class sampling interval for a positive definite start: an
/// off-diagonal pair must satisfy `|x| < sqrt(σᵢᵢσⱼⱼ)`, a diagonal unknown
/// must be positive. Falls back to `[−range, range]`.
fn draw_bounds(pm: &PartialMatrix, range: f64) -> Vec<(f64, f64)> {
    let specified = pm.pattern().specified();
    pm.pattern()
        .classes()
        .iter()
        .map(|class| {
            let (i, j) = class[0];
            if i == j {
                return (0.0, range);
            }
            match (specified.get(&(i, i)), specified.get(&(j, j))) {
                (Some(&a), Some(&b)) if a > 0.0 && b > 0.0 => {
                    let r = (a * b).sqrt();
                    (-r, r)
                }
                _ => (-range, range),
            }
        })
        .collect()
}

fn is_pd(sigma: &Matrix) -> bool {
    cholesky(sigma).is_ok()
}

/// Maximum-entropy symmetric positive definite completion.
///
/// Newton ascent on `log det Σ(x)`; a candidate step is accepted only if
/// the completion stays positive definite and `log det` increases; within
/// a few ulps of the current value, a smaller gradient is required instead.
pub fn dempster_spd(pm: &PartialMatrix, cfg: &SolverConfig) -> Result<DempsterSolution, DempsterError> {
    if pm.mode() != Mode::Square || !pm.pattern().is_symmetric() {
        return Err(DempsterError::PatternNotSymmetric);
    }
    let k = pm.k();
    let spd_at = |x: &[f64]| assemble(pm, x).map(|s| is_pd(&s)).unwrap_or(false);

    let x0 = if spd_at(&vec![0.0; k]) {
        vec![0.0; k]
    } else if k == 0 {
        return Err(DempsterError::NoPdStart);
    } else {
        let bounds = draw_bounds(pm, cfg.range_for(pm));
        (0..PD_START_DRAWS)
            .map(|s| {
                let unit = draw_point(&mut start_rng(cfg.seed, s), k, 1.0);
                unit.iter().zip(&bounds).map(|(u, &(lo, hi))| lo + 0.5 * (u + 1.0) * (hi - lo)).collect::<Vec<_>>()
            })
            .find(|x| spd_at(x))
            .ok_or(DempsterError::NoPdStart)?
    };

    let (x, eval, iterations, log_det_trace) = if k == 0 {
        let eval = evaluate(pm, &[]).map_err(|_| DempsterError::NoPdStart)?;
        let obj = eval.objective;
        (Vec::new(), eval, 0, vec![obj])
    } else {
        let sum_sq = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>();
        let run = damped_newton(
            pm,
            &x0,
            cfg,
            0.0,
            |e| is_pd(&e.sigma),
            |cur, cand| {
                // near the maximizer the increase in log det drops below
                // rounding; then a smaller gradient decides
                let slack = 4.0 * f64::EPSILON * (1.0 + cur.objective.abs());
                cand.objective > cur.objective + slack
                    || (cand.objective >= cur.objective - slack && sum_sq(&cand.gradient) < sum_sq(&cur.gradient))
            },
        )
        .map_err(DempsterError::Newton)?;
        (run.x, run.eval, run.iterations, run.objectives)
    };

    let entropy = entropy(&eval.sigma).map_err(|_| DempsterError::NoPdStart)?;
    let solution = Solution::from_evaluation(
        pm,
        x,
        &eval,
        Provenance {
            start: None,
            iterations,
        },
    );
    Ok(DempsterSolution {
        solution,
        entropy,
        log_det_trace,
    })
}

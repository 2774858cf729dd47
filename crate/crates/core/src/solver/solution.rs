use super::classify::{classify, Flags};
use crate::densela::Matrix;
use crate::partialmat::{evaluate, EvalError, Evaluation, PartialMatrix, ResidualReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Provenance {
    /// Multistart index, `None` for directly seeded runs.
    pub start: Option<usize>,
    pub iterations: usize,
}

/// A stationary completion, reported in the caller's orientation.
#[derive(Debug, Clone)]
pub struct Solution {
    pub x: Vec<f64>,
    pub sigma: Matrix,
    /// `Σ⁻¹` for square completions, the Moore–Penrose pseudoinverse otherwise.
    pub inv: Matrix,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub grad_norm: f64,
    pub residual: ResidualReport,
    pub flags: Flags,
    pub provenance: Provenance,
}

impl Solution {
    pub(crate) fn from_evaluation(
        pm: &PartialMatrix,
        x: Vec<f64>,
        eval: &Evaluation,
        provenance: Provenance,
    ) -> Self {
        let sigma = pm.to_original(&eval.sigma);
        let inv = pm.to_original(&eval.inv);
        let flags = classify(&sigma, &inv);
        Self {
            x,
            residual: ResidualReport::from_evaluation(pm, eval),
            objective: eval.objective,
            grad_norm: eval.grad_norm(),
            gradient: eval.gradient.clone(),
            sigma,
            inv,
            flags,
            provenance,
        }
    }

    /// The completion at a given `x`, stationary or not.
    pub fn at(pm: &PartialMatrix, x: &[f64]) -> Result<Self, EvalError> {
        let eval = evaluate(pm, x)?;
        Ok(Self::from_evaluation(
            pm,
            x.to_vec(),
            &eval,
            Provenance {
                start: None,
                iterations: 0,
            },
        ))
    }

    /// Largest (pseudo)inverse entry on the transposed unknown pattern,
    /// relative to `1 + ‖inv‖∞`.
    pub fn transposed_residual(&self) -> f64 {
        self.residual.max_abs() / (1.0 + self.inv.norm_inf())
    }
}

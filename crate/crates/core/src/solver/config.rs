use thiserror::Error;

use crate::partialmat::PartialMatrix;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("{0} must be positive and finite")]
    NonPositive(&'static str),
    #[error("starts must be at least 1")]
    NoStarts,
    #[error("backtracking contraction must lie in (0, 1)")]
    BadContraction,
}

/// Tolerances, iteration caps and multistart settings.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on `‖∇J‖∞`.
    pub grad_tol: f64,
    /// Relative `‖·‖∞` distance under which two solutions are the same.
    pub dedup_tol: f64,
    pub max_iters: usize,
    pub starts: usize,
    /// Half-width `r` of the sampling box `[−r, r]^k`; `None` means
    /// `2(1 + max|σᵢⱼ|)`.
    pub start_range: Option<f64>,
    pub seed: u64,
    /// Minimum Hadamard ratio an iterate must keep.
    pub singular_guard: f64,
    pub contraction: f64,
    pub min_step: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            grad_tol: 1e-10,
            dedup_tol: 1e-6,
            max_iters: 100,
            starts: 200,
            start_range: None,
            seed: 0,
            singular_guard: 1e-12,
            contraction: 0.5,
            min_step: 1e-12,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let positive = |v: f64, name| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(ConfigError::NonPositive(name))
            }
        };
        positive(self.grad_tol, "grad_tol")?;
        positive(self.dedup_tol, "dedup_tol")?;
        positive(self.singular_guard, "singular_guard")?;
        positive(self.min_step, "min_step")?;
        if let Some(r) = self.start_range {
            positive(r, "start_range")?;
        }
        if self.starts == 0 {
            return Err(ConfigError::NoStarts);
        }
        if !(self.contraction > 0.0 && self.contraction < 1.0) {
            return Err(ConfigError::BadContraction);
        }
        Ok(())
    }

    pub fn range_for(&self, pm: &PartialMatrix) -> f64 {
        self.start_range.unwrap_or_else(|| pm.default_start_range())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        assert_eq!(SolverConfig::default().validate(), Ok(()));
        let bad = SolverConfig {
            grad_tol: 0.0,
            ..Default::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::NonPositive("grad_tol")));
        let bad = SolverConfig {
            starts: 0,
            ..Default::default()
        };
        assert_eq!(bad.validate(), Err(ConfigError::NoStarts));
        let bad = SolverConfig {
            start_range: Some(-1.0),
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }
}

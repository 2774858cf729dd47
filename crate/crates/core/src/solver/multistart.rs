use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::SolverConfig;
use super::newton::{newton_from, NewtonFailure};
use super::solution::{Provenance, Solution};
use crate::partialmat::{evaluate, PartialMatrix};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultistartStats {
    pub starts: usize,
    pub converged: usize,
    pub distinct: usize,
    pub failures: BTreeMap<NewtonFailure, usize>,
}

/// Deduplicated stationary completions, best objective first.
#[derive(Debug, Clone, Default)]
pub struct SolutionSet {
    pub solutions: Vec<Solution>,
    pub stats: MultistartStats,
}

impl SolutionSet {
    pub fn is_empty(&self) -> bool {
        self.solutions.is_empty()
    }

    pub fn len(&self) -> usize {
        self.solutions.len()
    }
}

/// Random stream for start `index`: the base seed selects the key, the
/// start index the stream, so draws do not depend on scheduling.
pub(crate) fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

pub(crate) fn draw_point(rng: &mut impl Rng, k: usize, range: f64) -> Vec<f64> {
    (0..k).map(|_| rng.gen_range(-range..=range)).collect()
}

/// The point multistart draws for start `index`.
pub fn sample_point(seed: u64, index: usize, k: usize, range: f64) -> Vec<f64> {
    draw_point(&mut start_rng(seed, index), k, range)
}

fn same_point(a: &[f64], b: &[f64], tol: f64) -> bool {
    let inf = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let dist = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    dist <= tol * inf(a).max(inf(b)).max(1.0)
}

fn report_order(a: &Solution, b: &Solution) -> Ordering {
    b.objective.total_cmp(&a.objective).then_with(|| {
        a.x.iter()
            .zip(&b.x)
            .map(|(p, q)| p.total_cmp(q))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Newton from `cfg.starts` seeded uniform draws on `[−r, r]^k`.
///
/// Starts run in parallel; results are merged in start order, so the
/// output depends only on `(pm, cfg)`.
pub fn multistart(pm: &PartialMatrix, cfg: &SolverConfig) -> SolutionSet {
    let k = pm.k();
    if k == 0 {
        let mut stats = MultistartStats {
            starts: 1,
            ..Default::default()
        };
        return match evaluate(pm, &[]) {
            Ok(eval) => {
                stats.converged = 1;
                stats.distinct = 1;
                let prov = Provenance {
                    start: None,
                    iterations: 0,
                };
                SolutionSet {
                    solutions: vec![Solution::from_evaluation(pm, Vec::new(), &eval, prov)],
                    stats,
                }
            }
            Err(_) => {
                stats.failures.insert(NewtonFailure::SingularStart, 1);
                SolutionSet {
                    solutions: Vec::new(),
                    stats,
                }
            }
        };
    }

    let range = cfg.range_for(pm);
    let outcomes: Vec<Result<Solution, NewtonFailure>> = (0..cfg.starts)
        .into_par_iter()
        .map(|s| {
            let x0 = sample_point(cfg.seed, s, k, range);
            newton_from(pm, &x0, cfg, Some(s))
        })
        .collect();

    let mut stats = MultistartStats {
        starts: cfg.starts,
        ..Default::default()
    };
    let mut solutions: Vec<Solution> = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(sol) => {
                stats.converged += 1;
                if !solutions
                    .iter()
                    .any(|s| same_point(&s.x, &sol.x, cfg.dedup_tol))
                {
                    solutions.push(sol);
                }
            }
            Err(reason) => *stats.failures.entry(reason).or_default() += 1,
        }
    }
    solutions.sort_by(report_order);
    stats.distinct = solutions.len();
    SolutionSet { solutions, stats }
}

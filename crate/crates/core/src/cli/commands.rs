use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

use super::input::{load_matrix, parse_x, InputDocument, InputError};
use super::output::{
    AppliedRecord, ConfigEcho, Diagnostics, ExcludedSample, GradcheckReport, GradcheckSample, OutputDocument,
    RunStats, SolutionRecord,
};
use crate::oracle::{fd_gradient, reciprocal_condition, rel_error};
use crate::partialmat::{evaluate, structural_precheck, PartialMatrix};
use crate::solver::{
    apply_completion, dempster_spd, multistart, sample_point, ConfigError, DempsterError, Side, Solution,
    SolutionSet, SolverConfig,
};

/// Relative error above which a gradient sample fails.
pub const GRADCHECK_THRESHOLD: f64 = 1e-5;
/// Finite-difference step, relative to `1 + |x_c|`.
pub const GRADCHECK_STEP: f64 = 1e-5;
/// Samples closer than this (in reciprocal condition) to singularity are skipped.
pub const GRADCHECK_MIN_RCOND: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    InputError = 1,
    NoSolution = 2,
    GradcheckFailed = 3,
}

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("invalid configuration: {0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug)]
pub struct Outcome {
    pub document: OutputDocument,
    pub status: ExitStatus,
}

/// Loaded input plus everything the diagnostics echo needs.
pub struct Context {
    pub doc: InputDocument,
    pub pm: PartialMatrix,
    pub cfg: SolverConfig,
}

impl Context {
    pub fn load(path: &Path, cfg: SolverConfig) -> Result<Self, CommandError> {
        cfg.validate()?;
        let doc = InputDocument::load(path)?;
        let pm = doc.to_partial_matrix(path)?;
        Ok(Self { doc, pm, cfg })
    }

    fn diagnostics(&self, warnings: Vec<String>, failures: BTreeMap<String, usize>) -> Diagnostics {
        Diagnostics {
            warnings,
            failures,
            stats: None,
            config: ConfigEcho {
                starts: self.cfg.starts,
                seed: self.cfg.seed,
                range: self.cfg.range_for(&self.pm),
                grad_tol: self.cfg.grad_tol,
                dedup_tol: self.cfg.dedup_tol,
                max_iters: self.cfg.max_iters,
                singular_guard: self.cfg.singular_guard,
                samples: None,
            },
            input: self.doc.clone(),
            version: concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION")).to_string(),
        }
    }

    fn document(&self, command: &'static str, solutions: Vec<SolutionRecord>, diagnostics: Diagnostics) -> OutputDocument {
        OutputDocument {
            command,
            solutions,
            gradcheck: None,
            applied: None,
            diagnostics,
        }
    }
}

fn precheck_warnings(pm: &PartialMatrix) -> Vec<String> {
    structural_precheck(pm).iter().map(ToString::to_string).collect()
}

fn run_multistart(ctx: &Context) -> (SolutionSet, Diagnostics) {
    let warnings = precheck_warnings(&ctx.pm);
    let set = multistart(&ctx.pm, &ctx.cfg);
    let failures = set
        .stats
        .failures
        .iter()
        .map(|(reason, &n)| (reason.as_str().to_string(), n))
        .collect();
    let mut diagnostics = ctx.diagnostics(warnings, failures);
    diagnostics.stats = Some(RunStats {
        starts: set.stats.starts,
        converged: set.stats.converged,
        distinct: set.stats.distinct,
    });
    (set, diagnostics)
}

pub fn complete(ctx: &Context) -> Outcome {
    let (set, diagnostics) = run_multistart(ctx);
    let status = if set.is_empty() {
        ExitStatus::NoSolution
    } else {
        ExitStatus::Success
    };
    let solutions = set.solutions.iter().map(|s| SolutionRecord::new(s, None)).collect();
    Outcome {
        document: ctx.document("complete", solutions, diagnostics),
        status,
    }
}

pub fn dempster(ctx: &Context) -> Result<Outcome, CommandError> {
    match dempster_spd(&ctx.pm, &ctx.cfg) {
        Ok(d) => Ok(Outcome {
            document: ctx.document(
                "dempster",
                vec![SolutionRecord::new(&d.solution, Some(d.entropy))],
                ctx.diagnostics(Vec::new(), BTreeMap::new()),
            ),
            status: ExitStatus::Success,
        }),
        Err(DempsterError::PatternNotSymmetric) => Err(CommandError::Usage(DempsterError::PatternNotSymmetric.to_string())),
        Err(e) => {
            let reason = match e {
                DempsterError::Newton(f) => f.as_str().to_string(),
                _ => "no-pd-start".to_string(),
            };
            let failures = BTreeMap::from([(reason, 1)]);
            Ok(Outcome {
                document: ctx.document("dempster", Vec::new(), ctx.diagnostics(vec![e.to_string()], failures)),
                status: ExitStatus::NoSolution,
            })
        }
    }
}

fn x_for(ctx: &Context, text: &str) -> Result<Vec<f64>, CommandError> {
    let x = parse_x(text).map_err(CommandError::Usage)?;
    if x.len() != ctx.pm.k() {
        return Err(CommandError::Usage(format!(
            "--x has {} values but the pattern has {} unknown classes",
            x.len(),
            ctx.pm.k()
        )));
    }
    Ok(x)
}

/// Informational: a singular completion is reported as a warning, not an error.
pub fn verify(ctx: &Context, x_text: &str) -> Result<Outcome, CommandError> {
    let x = x_for(ctx, x_text)?;
    let (solutions, warnings) = match Solution::at(&ctx.pm, &x) {
        Ok(sol) => (vec![SolutionRecord::new(&sol, None)], Vec::new()),
        Err(e) => (Vec::new(), vec![format!("completion at the given x has no (pseudo)inverse: {e}")]),
    };
    Ok(Outcome {
        document: ctx.document("verify", solutions, ctx.diagnostics(warnings, BTreeMap::new())),
        status: ExitStatus::Success,
    })
}

pub fn gradcheck(ctx: &Context, samples: usize) -> Result<Outcome, CommandError> {
    if samples == 0 {
        return Err(CommandError::Usage("--samples must be at least 1".into()));
    }
    let pm = &ctx.pm;
    let range = ctx.cfg.range_for(pm);
    let mut checked = Vec::new();
    let mut excluded = Vec::new();
    for index in 0..samples {
        let x = sample_point(ctx.cfg.seed, index, pm.k(), range);
        let eval = match evaluate(pm, &x) {
            Ok(e) => e,
            Err(e) => {
                excluded.push(ExcludedSample {
                    index,
                    reason: format!("singular: {e}"),
                });
                continue;
            }
        };
        let rcond = reciprocal_condition(&eval.sigma);
        if rcond < GRADCHECK_MIN_RCOND {
            excluded.push(ExcludedSample {
                index,
                reason: format!("ill-conditioned: reciprocal condition {rcond:e}"),
            });
            continue;
        }
        match fd_gradient(pm, &x, GRADCHECK_STEP) {
            Ok(fd) => checked.push(GradcheckSample {
                index,
                rel_error: rel_error(&eval.gradient, &fd),
                x,
                analytic: eval.gradient,
                finite_difference: fd,
            }),
            Err(e) => excluded.push(ExcludedSample {
                index,
                reason: e.to_string(),
            }),
        }
    }
    if checked.is_empty() {
        return Err(CommandError::Usage(format!(
            "all {samples} gradient probes were singular or ill-conditioned"
        )));
    }
    let worst = (0..checked.len()).max_by(|&a, &b| checked[a].rel_error.total_cmp(&checked[b].rel_error));
    let passed = checked.iter().all(|s| s.rel_error < GRADCHECK_THRESHOLD);
    let mut warnings = Vec::new();
    if let (false, Some(w)) = (passed, worst) {
        warnings.push(format!(
            "sample {} has relative gradient error {:e}",
            checked[w].index, checked[w].rel_error
        ));
    }
    let mut diagnostics = ctx.diagnostics(warnings, BTreeMap::new());
    diagnostics.config.samples = Some(samples);
    let mut document = ctx.document("gradcheck", Vec::new(), diagnostics);
    document.gradcheck = Some(GradcheckReport {
        threshold: GRADCHECK_THRESHOLD,
        passed,
        samples: checked,
        excluded,
        worst,
    });
    Ok(Outcome {
        document,
        status: if passed {
            ExitStatus::Success
        } else {
            ExitStatus::GradcheckFailed
        },
    })
}

pub fn solve(ctx: &Context, b_path: &Path, side: Side, x_text: Option<&str>) -> Result<Outcome, CommandError> {
    let b = load_matrix(b_path)?;
    let p = ctx.pm.original_pattern();
    side.check((p.rows(), p.cols()), &b)
        .map_err(|e| CommandError::Usage(e.to_string()))?;
    let side_name = match side {
        Side::Left => "left",
        Side::Right => "right",
    };

    let (sol, diagnostics) = match x_text {
        Some(text) => {
            let x = x_for(ctx, text)?;
            match Solution::at(&ctx.pm, &x) {
                Ok(sol) => (sol, ctx.diagnostics(Vec::new(), BTreeMap::new())),
                Err(e) => {
                    let warnings = vec![format!("completion at the given x has no (pseudo)inverse: {e}")];
                    return Ok(Outcome {
                        document: ctx.document("solve", Vec::new(), ctx.diagnostics(warnings, BTreeMap::new())),
                        status: ExitStatus::NoSolution,
                    });
                }
            }
        }
        None => {
            let (set, diagnostics) = run_multistart(ctx);
            match set.solutions.into_iter().next() {
                Some(best) => (best, diagnostics),
                None => {
                    return Ok(Outcome {
                        document: ctx.document("solve", Vec::new(), diagnostics),
                        status: ExitStatus::NoSolution,
                    })
                }
            }
        }
    };
    let applied = apply_completion(&sol, &b, side).map_err(|e| CommandError::Usage(e.to_string()))?;
    let mut document = ctx.document("solve", vec![SolutionRecord::new(&sol, None)], diagnostics);
    document.applied = Some(AppliedRecord {
        side: side_name,
        x: applied.x.to_rows(),
        exploited_zeros: applied.exploited_zeros,
    });
    Ok(Outcome {
        document,
        status: ExitStatus::Success,
    })
}

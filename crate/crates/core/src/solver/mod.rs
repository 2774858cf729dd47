//! Completion solvers.
//!
//! * [`newton`]: damped Newton on the stationarity system `∇J(x) = 0`,
//!   backtracking on `‖∇J‖²` with a nonsingularity guard.
//! * [`multistart`]: seeded Newton restarts, deduplicated and ordered.
//! * [`dempster_spd`]: the maximum-entropy positive definite completion of a
//!   symmetric pattern.
//! * [`dual_solve`]: Newton on the dual parametrization, where the
//!   (pseudo)inverse is supported on the transposed specified set and the
//!   unknowns are its nonzero entries.
//! * [`apply_completion`]: use a completion to solve `ΣX = B` or `XΣ = B`.

mod apply;
mod classify;
mod config;
mod dempster;
mod dual;
mod multistart;
mod newton;
mod solution;

pub use apply::{apply_completion, AppliedCompletion, Side};
pub use classify::{classify, Flags};
pub use config::{ConfigError, SolverConfig};
pub use dempster::{dempster_spd, entropy, DempsterError, DempsterSolution};
pub use dual::{dual_solve, DualFailure, DualInit, DualParameters};
pub use multistart::{multistart, sample_point, MultistartStats, SolutionSet};
pub use newton::{newton, NewtonFailure};
pub use solution::{Provenance, Solution};

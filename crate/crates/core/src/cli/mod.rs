//! Command-line front end.
//!
//! Input is a JSON partial matrix with 1-based positions; output is a JSON
//! document (or an indented text rendering of the same values). Exit codes:
//! 0 success, 1 usage or input error, 2 no solution, 3 gradient check failed.

pub mod commands;
pub mod input;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{CommandError, ExitStatus, Outcome};
pub use input::{InputDocument, InputError};
pub use output::OutputDocument;

use crate::solver::{Side, SolverConfig};

#[derive(Debug, Parser)]
#[command(name = "parsimony", version, about = "Critical-point completion of partially specified matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Partial matrix (JSON).
    pub file: PathBuf,
    /// Number of random Newton starts.
    #[arg(long)]
    pub starts: Option<usize>,
    /// Seed for the start sampler.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Half-width of the start box; default 2(1 + max|specified|).
    #[arg(long)]
    pub range: Option<f64>,
    /// Gradient tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Common {
    pub fn config(&self) -> SolverConfig {
        let d = SolverConfig::default();
        SolverConfig {
            starts: self.starts.unwrap_or(d.starts),
            seed: self.seed.unwrap_or(d.seed),
            start_range: self.range,
            grad_tol: self.tol.unwrap_or(d.grad_tol),
            ..d
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Find critical-point completions by seeded multistart Newton.
    Complete {
        #[command(flatten)]
        common: Common,
    },
    /// Maximum-entropy positive definite completion of a symmetric pattern.
    Dempster {
        #[command(flatten)]
        common: Common,
    },
    /// Report residuals, gradient and structure at a given completion.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Unknowns, one per class, comma separated; fractions allowed.
        #[arg(long, allow_hyphen_values = true)]
        x: String,
    },
    /// Compare the analytic gradient with finite differences at random points.
    Gradcheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// Solve ΣX = B (left) or XΣ = B (right) with a completion.
    Solve {
        #[command(flatten)]
        common: Common,
        /// Right-hand side: JSON list of rows.
        b_file: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
        /// Use this completion instead of running multistart.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<String>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Self::Complete { common }
            | Self::Dempster { common }
            | Self::Verify { common, .. }
            | Self::Gradcheck { common, .. }
            | Self::Solve { common, .. } => common,
        }
    }
}

/// Run a parsed command.
pub fn execute(command: &Command) -> Result<Outcome, CommandError> {
    let common = command.common();
    let ctx = commands::Context::load(&common.file, common.config())?;
    match command {
        Command::Complete { .. } => Ok(commands::complete(&ctx)),
        Command::Dempster { .. } => commands::dempster(&ctx),
        Command::Verify { x, .. } => commands::verify(&ctx, x),
        Command::Gradcheck { samples, .. } => commands::gradcheck(&ctx, *samples),
        Command::Solve { b_file, side, x, .. } => {
            let side = match side {
                SideArg::Left => Side::Left,
                SideArg::Right => Side::Right,
            };
            commands::solve(&ctx, b_file, side, x.as_deref())
        }
    }
}

/// Parse arguments, run, write the report; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitStatus::InputError as i32 } else { 0 };
        }
    };
    let outcome = match execute(&cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitStatus::InputError as i32;
        }
    };
    let common = cli.command.common();
    let text = match common.format {
        Format::Json => outcome.document.to_json(),
        Format::Text => outcome.document.to_text(),
    };
    let written = match &common.out {
        Some(path) => fs::write(path, &text).map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| format!("cannot write output: {e}")),
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitStatus::InputError as i32;
    }
    for w in &outcome.document.diagnostics.warnings {
        eprintln!("warning: {w}");
    }
    outcome.status as i32
}

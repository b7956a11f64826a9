//! The `gconv-risk` command line.
//!
//! Every subcommand writes its data file(s) plus `<command>.meta.json` into
//! `--out`, then prints one summary line. Exit status is 0 on success, 1
//! for I/O failures, 2 for invalid input and 3 when a computation fails or
//! the model is degenerate (for instance `rho >= 1`).
//!
//! JSON arguments (`--model`, `--law`, `--algebra`, `--step-law`) take
//! inline text starting with `{` or a path to a file.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::Error;

pub use io::{parse_algebra, parse_grid, parse_law, parse_model};

pub use crate::rng::DEFAULT_SEED;

/// Environment variable read for `--workers`.
pub const WORKERS_ENV: &str = "GCONV_RISK_WORKERS";

#[derive(Debug, Parser)]
#[command(name = "gconv-risk", version, about = "Random walks and ruin under generalized convolutions")]
pub struct Cli {
    /// Directory receiving data and metadata files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,

    /// Worker threads for Monte Carlo loops. Results do not depend on it.
    #[arg(long, global = true, env = WORKERS_ENV)]
    pub workers: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Command {
    /// Draw i.i.d. samples from a law.
    Sample(SampleArgs),
    /// Law of `delta_x ⋄ delta_y` as atoms plus a CDF table.
    Convolve(ConvolveArgs),
    /// Williamson transform of a law, or its inversion.
    Transform(TransformArgs),
    /// Simulate random walks.
    Walk(WalkArgs),
    /// First safety condition at time `t`.
    Safety(SafetyArgs),
    /// Ruin probabilities.
    Ruin(RuinArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Sample(_) => "sample",
            Command::Convolve(_) => "convolve",
            Command::Transform(_) => "transform",
            Command::Walk(_) => "walk",
            Command::Safety(_) => "safety",
            Command::Ruin(_) => "ruin",
        }
    }

    fn seed(&self) -> Option<u64> {
        match self {
            Command::Sample(a) => Some(a.seed),
            Command::Walk(a) => Some(a.seed),
            Command::Ruin(a) => Some(a.seed),
            _ => None,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SampleArgs {
    #[arg(long)]
    pub law: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct ConvolveArgs {
    #[arg(long)]
    pub algebra: String,
    #[arg(long)]
    pub x: f64,
    #[arg(long)]
    pub y: f64,
    /// Points in the CDF table.
    #[arg(long, default_value_t = 512)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct TransformArgs {
    /// A Kendall algebra, e.g. `{"kind": "kendall", "alpha": 1}`.
    #[arg(long)]
    pub algebra: String,
    #[arg(long)]
    pub law: String,
    /// Emit `F` recovered from the transform instead of the transform.
    #[arg(long)]
    pub invert: bool,
    /// `t0:t1:n`, `n` equally spaced points.
    #[arg(long)]
    pub grid: String,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long)]
    pub algebra: String,
    #[arg(long)]
    pub step_law: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0)]
    pub start: f64,
    /// Emit every state instead of terminal states.
    #[arg(long)]
    pub full: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct SafetyArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long)]
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodArg {
    Auto,
    Volterra,
    Ode,
    Closed,
    Mc,
}

#[derive(Debug, Args, Serialize)]
pub struct RuinArgs {
    #[arg(long)]
    pub model: String,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Capital level; defaults to the model's `u`.
    #[arg(long, conflicts_with = "u_grid")]
    pub u: Option<f64>,
    /// `a:b:n` capital grid.
    #[arg(long)]
    pub u_grid: Option<String>,
    /// Finite time horizon (Monte Carlo only).
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub paths: usize,
    /// Claims simulated per path for infinite-horizon Monte Carlo.
    #[arg(long, default_value_t = crate::ruin::DEFAULT_HORIZON)]
    pub horizon: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.99)]
    pub confidence: f64,
    /// Volterra grid intervals.
    #[arg(long, default_value_t = crate::ruin::DEFAULT_VOLTERRA_STEPS)]
    pub steps: usize,
}

/// What a finished subcommand reports.
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub summary: String,
}

/// Exit status for an error: 2 for bad input, 3 for failed computations.
pub fn exit_code(e: &Error) -> u8 {
    if e.is_validation() {
        2
    } else if matches!(e, Error::Io(_)) {
        1
    } else {
        3
    }
}

/// Runs a parsed command line, writing outputs and metadata.
pub fn run(cli: &Cli) -> Result<Outcome, Error> {
    if let Some(w) = cli.workers {
        if w == 0 {
            return Err(Error::InvalidParameter {
                name: "workers",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        // The global pool can only be set once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w).build_global();
    }
    std::fs::create_dir_all(&cli.out)?;
    let started = std::time::Instant::now();
    let (outcome, inputs) = match &cli.command {
        Command::Sample(a) => commands::sample(a, &cli.out)?,
        Command::Convolve(a) => commands::convolve(a, &cli.out)?,
        Command::Transform(a) => commands::transform(a, &cli.out)?,
        Command::Walk(a) => commands::walk(a, &cli.out)?,
        Command::Safety(a) => commands::safety(a, &cli.out)?,
        Command::Ruin(a) => commands::ruin(a, &cli.out)?,
    };
    let elapsed = started.elapsed().as_secs_f64();
    let meta = io::Metadata {
        command: cli.command.name(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.command.seed(),
        workers: rayon::current_num_threads(),
        config: &cli.command,
        inputs,
        outputs: outcome
            .files
            .iter()
            .filter_map(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
            .collect(),
        timings: io::Timings { total_seconds: elapsed },
    };
    let meta_path = cli.out.join(format!("{}.meta.json", cli.command.name()));
    io::write_json(&meta_path, &meta)?;
    let mut files = outcome.files;
    files.push(meta_path);
    Ok(Outcome {
        files,
        summary: outcome.summary,
    })
}

/// Entry point for the binary.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

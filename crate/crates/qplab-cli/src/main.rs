//! `qplab`: reproducible experiments over the qplab library.
//!
//! Exit codes: 0 on success, 2 when a promise violation is detected, 1 on
//! I/O, parse and usage errors.

mod crypto;
mod gen;
mod metrics;
mod out;
mod protocol;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qplab::QError;

#[derive(Parser, Debug)]
#[command(name = "qplab", version, about = "Desk-scale quantum promise problem experiments")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Serialize)]
pub struct Global {
    /// 64-bit seed; falls back to QPLAB_SEED. Required in sampled mode.
    #[arg(long, global = true, env = "QPLAB_SEED")]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Exact)]
    pub mode: Mode,
    /// Worker threads for trial-parallel commands.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub trials: Option<usize>,
    /// Tolerance for pass/fail checks.
    #[arg(long, global = true, default_value_t = 1e-8)]
    pub tol: f64,
    /// Report path (stdout when absent).
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
enum Command {
    /// Generate instance, scheme and state files.
    Gen {
        #[command(subcommand)]
        kind: gen::GenKind,
    },
    /// Single-copy Quantum OR on a stored instance.
    Qor(verify::QorArgs),
    /// Local Hamiltonian with a pure unknown input.
    Lhwp(verify::LhwpArgs),
    /// Local Hamiltonian with a mixed unknown input.
    Lhwm(verify::LhwmArgs),
    /// Parallel repetition of a Bernoulli verifier.
    Amplify(verify::AmplifyArgs),
    /// Witness search through the prefix oracle.
    Stod(verify::StodArgs),
    /// Identify a candidate state by binary search.
    Identify(verify::IdentifyArgs),
    /// Interactive protocols.
    Protocol(protocol::ProtocolArgs),
    /// Cryptographic games.
    Crypto {
        #[command(subcommand)]
        game: crypto::Game,
    },
    /// Distance and fidelity of two states.
    Metrics(metrics::MetricsArgs),
}

/// Resolved settings handed to every command.
#[derive(Debug, Clone, Serialize)]
pub struct Ctx {
    pub seed: u64,
    pub mode: Mode,
    pub jobs: Option<usize>,
    pub trials: Option<usize>,
    pub tol: f64,
}

impl Ctx {
    pub fn sampled(&self) -> bool {
        self.mode == Mode::Sampled
    }

    pub fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }

    /// Runs `f` on a pool with the requested number of threads.
    pub fn pool<T: Send>(&self, f: impl FnOnce() -> T + Send) -> T {
        match self.jobs {
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .expect("thread pool")
                .install(f),
            None => f(),
        }
    }
}

#[derive(Debug)]
pub enum CliError {
    Q(QError),
    Io(String),
    Usage(String),
}

impl From<QError> for CliError {
    fn from(e: QError) -> Self {
        CliError::Q(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Q(e) => write!(f, "{e}"),
            CliError::Io(s) | CliError::Usage(s) => f.write_str(s),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Q(QError::Promise(_)) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn resolve(g: &Global) -> CliResult<Ctx> {
    if g.mode == Mode::Sampled && g.seed.is_none() {
        return Err(CliError::Usage("sampled mode needs --seed or QPLAB_SEED".into()));
    }
    if !(g.tol > 0.0) {
        return Err(CliError::Usage(format!("tolerance must be positive, got {}", g.tol)));
    }
    if g.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    Ok(Ctx { seed: g.seed.unwrap_or(0), mode: g.mode, jobs: g.jobs, trials: g.trials, tol: g.tol })
}

fn run(cli: &Cli) -> CliResult<()> {
    let ctx = resolve(&cli.global)?;
    let result = match &cli.command {
        Command::Gen { kind } => gen::run(kind, &ctx)?,
        Command::Qor(a) => verify::qor(a, &ctx)?,
        Command::Lhwp(a) => verify::lhwp(a, &ctx)?,
        Command::Lhwm(a) => verify::lhwm(a, &ctx)?,
        Command::Amplify(a) => verify::amplify(a, &ctx)?,
        Command::Stod(a) => verify::stod(a, &ctx)?,
        Command::Identify(a) => verify::identify(a, &ctx)?,
        Command::Protocol(a) => protocol::run(a, &ctx)?,
        Command::Crypto { game } => crypto::run(game, &ctx)?,
        Command::Metrics(a) => metrics::run(a, &ctx)?,
    };
    let config = serde_json::json!({
        "run": &cli.command,
        "seed": ctx.seed,
        "mode": ctx.mode,
        "jobs": ctx.jobs,
        "trials": ctx.trials,
        "tol": ctx.tol,
        "report": &cli.global.report,
    });
    out::emit_report(config, result, cli.global.report.as_deref())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

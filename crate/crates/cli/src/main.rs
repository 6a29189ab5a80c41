//! `honeycomb`: evaluate honeycomb spin-networks, enumerate cycle colorings
//! and rank transition matrices.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use honeycomb_core::{Error, QParam};

#[derive(Parser, Debug)]
#[command(
    name = "honeycomb",
    version,
    about = "Exact honeycomb spin-network evaluation"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Recoupling backend.
    #[arg(long, value_enum, default_value_t = Backend::Classical, global = true)]
    pub backend: Backend,
    /// Root-of-unity level for the quantum backend.
    #[arg(long, default_value_t = 10, global = true)]
    pub r: u64,
    /// Worker threads (also HONEYCOMB_WORKERS).
    #[arg(long, env = "HONEYCOMB_WORKERS", global = true)]
    pub workers: Option<usize>,
    /// Directory holding persisted recoupling memo tables (also HONEYCOMB_CACHE).
    #[arg(long, env = "HONEYCOMB_CACHE", global = true)]
    pub cache: Option<PathBuf>,
    /// Directory for file outputs.
    #[arg(long, short, default_value = ".", global = true)]
    pub out: PathBuf,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    Classical,
    Quantum,
}

impl Global {
    pub fn param(&self) -> Result<QParam, Error> {
        match self.backend {
            Backend::Classical => Ok(QParam::Classical),
            Backend::Quantum => QParam::RootOfUnity(self.r).validate(),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate H_n under a coloring.
    Eval(commands::EvalArgs),
    /// Enumerate the simple cycles of H_n.
    Cycles(commands::CyclesArgs),
    /// Count or stream cycle-multiset configurations.
    Configs(commands::ConfigsArgs),
    /// Build and write the dense transition matrix.
    Matrix(commands::MatrixArgs),
    /// Rank configurations by row sum and report classes.
    Rank(commands::RankArgs),
    /// Write or check a file of reference evaluations.
    Golden(commands::GoldenArgs),
}

/// Exit codes: 1 input error, 2 budget exceeded, 3 invariant violation.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::OracleBudget { .. } | Error::StorageBudget { .. } => 2,
        Error::Invariant(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    ExitCode::SUCCESS
                }
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let g = cli.global;
    let workers = g
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(Error::InvalidParam(
            "worker count must be at least 1".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidParam(format!("cannot start workers: {e}")))?;
    let param = g.param()?;
    let engine = output::load_engine(param, g.cache.as_deref())?;
    let result = pool.install(|| match cli.command {
        Command::Eval(a) => commands::eval(&engine, a),
        Command::Cycles(a) => commands::cycles(&g, a),
        Command::Configs(a) => commands::configs(&g, a),
        Command::Matrix(a) => commands::matrix(&g, &engine, a),
        Command::Rank(a) => commands::rank(&g, &engine, a),
        Command::Golden(a) => commands::golden(a),
    });
    if result.is_ok() {
        if let Some(dir) = &g.cache {
            output::save_engine(&engine, dir)?;
        }
    }
    result
}

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;
mod error;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use floquet_work::asymptotic::SingularityCase;

use crate::config::{Command, RunConfig};
use crate::error::CliError;

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "FLOQUET_WORKERS";

#[derive(Parser)]
#[command(
    name = "floquet-work",
    version,
    about = "Work statistics of a periodically driven Ising chain"
)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `output.dir`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Per-mode Floquet spectrum table.
    Spectrum(Common),
    /// Generating-function curves at finite n and in the stationary limit.
    Cgf(Common),
    /// Resonance report, small-k fit and singularity classification.
    Diagnose {
        #[command(flatten)]
        common: Common,
        /// Exit with 10/11/12 for cases a/b/c instead of 0.
        #[arg(long)]
        case_exit_code: bool,
    },
    /// Irreversible entropy over a frequency sweep.
    Entropy(Common),
    /// Finite-length work histogram.
    Workhist(Common),
}

fn configure_workers() -> Result<(), CliError> {
    if let Ok(v) = std::env::var(WORKERS_ENV) {
        let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
            CliError::Config(format!(
                "{WORKERS_ENV} = `{v}`: expected a positive integer"
            ))
        })?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("{WORKERS_ENV}: {e}")))?;
    }
    Ok(())
}

fn load(path: &Path, command: Command) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    RunConfig::parse(&text, command, base)
}

fn case_code(case: SingularityCase) -> u8 {
    match case {
        SingularityCase::A => 10,
        SingularityCase::B => 11,
        SingularityCase::C => 12,
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    configure_workers()?;
    let (common, command, case_exit) = match &cli.command {
        Sub::Spectrum(c) => (c, Command::Spectrum, false),
        Sub::Cgf(c) => (c, Command::Cgf, false),
        Sub::Diagnose {
            common,
            case_exit_code,
        } => (common, Command::Diagnose, *case_exit_code),
        Sub::Entropy(c) => (c, Command::Entropy, false),
        Sub::Workhist(c) => (c, Command::Workhist, false),
    };
    let cfg = load(&common.config, command)?;
    let out = cfg.output_dir(common.out.as_deref())?;
    let outcome = match command {
        Command::Spectrum => commands::cmd_spectrum(&cfg, &out)?,
        Command::Cgf => commands::cmd_cgf(&cfg, &out)?,
        Command::Diagnose => commands::cmd_diagnose(&cfg, &out)?,
        Command::Entropy => commands::cmd_entropy(&cfg, &out)?,
        Command::Workhist => commands::cmd_workhist(&cfg, &out)?,
    };
    for f in &outcome.files {
        println!("{}", f.display());
    }
    if let Some(case) = outcome.case {
        eprintln!("case {}", case.label());
        if case_exit {
            return Ok(case_code(case));
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("floquet-work: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

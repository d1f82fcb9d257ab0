mod commands;
mod config;
mod error;
mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use confperc::parallel::Workers;

use config::Experiment;
use error::CliError;
use output::{sha256_hex, Manifest};

/// Conformal invariance experiments for percolation on periodic lattices.
#[derive(Debug, Parser)]
#[command(name = "confperc", version)]
struct Cli {
    /// Directory receiving result files and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for Monte Carlo runs (results do not depend on it).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(flatten)]
    Experiment(Experiment),
    /// Run an experiment described by a JSON config file.
    Run { config: PathBuf },
}

fn load_config(path: &Path) -> Result<Experiment, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn execute(cli: Cli) -> Result<PathBuf, CliError> {
    let exp = match cli.command {
        Command::Experiment(e) => e,
        Command::Run { config } => load_config(&config)?,
    };
    if cli.workers == Some(0) {
        return Err(CliError::Config("--workers must be at least 1".into()));
    }
    let started = Instant::now();
    let artifacts = commands::run(&exp, Workers(cli.workers))?;
    let canonical = exp.canonical_json();
    let manifest = Manifest {
        tool: "confperc",
        version: env!("CARGO_PKG_VERSION"),
        command: exp.name().into(),
        config: serde_json::from_str(&canonical).expect("canonical JSON parses"),
        config_hash: sha256_hex(canonical.as_bytes()),
        seed: exp.seed(),
        workers: cli.workers,
        runtime_seconds: started.elapsed().as_secs_f64(),
        outputs: Vec::new(),
    };
    Ok(output::publish(&cli.out, &artifacts, manifest)?)
}

fn fail(err: &CliError) -> ExitCode {
    let record = serde_json::json!({ "error": err.record() });
    eprintln!("{record}");
    ExitCode::from(err.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return fail(&CliError::Config(e.kind().to_string()));
        }
        Err(e) => e.exit(),
    };
    match execute(cli) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => fail(&e),
    }
}

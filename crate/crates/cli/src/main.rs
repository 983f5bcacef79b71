use std::path::PathBuf;
use std::process::ExitCode;

use cgauge_cli::{CliError, Outcome, RunOptions};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "cgauge", version, about = "Coulomb-gauge 1/c^2 Hamiltonian verification runs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one scenario and write its artifacts.
    Run(Common),
    /// Integrate two classical models from shared initial conditions.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long, env = "CGAUGE_CONFIG")]
    config: PathBuf,
    /// Output root; artifacts go to <out>/<run-name>/.
    #[arg(long, env = "CGAUGE_OUT", default_value = "out")]
    out: PathBuf,
    /// Overrides the seed of randomized runs.
    #[arg(long, env = "CGAUGE_SEED")]
    seed: Option<u64>,
    /// Worker threads (defaults to all cores).
    #[arg(long, env = "CGAUGE_THREADS")]
    threads: Option<usize>,
}

impl From<Common> for RunOptions {
    fn from(c: Common) -> Self {
        RunOptions { config: c.config, out: c.out, seed: c.seed, threads: c.threads }
    }
}

fn finish(result: Result<Outcome, CliError>) -> ExitCode {
    match result {
        Ok(outcome) => {
            for (name, ok) in &outcome.checks {
                println!("{} {name}", if *ok { "PASS" } else { "FAIL" });
            }
            println!("artifacts: {}", outcome.dir.display());
            ExitCode::from(if outcome.passed() { 0 } else { 1 })
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(c) => finish(cgauge_cli::run(&c.into())),
        Command::Compare(c) => finish(cgauge_cli::compare(&c.into())),
    }
}

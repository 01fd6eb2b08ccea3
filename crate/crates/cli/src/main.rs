use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use shockdual_cli::commands::{check, demo, riemann, simulate, transform, Outcome};
use shockdual_cli::config::{self, ScenarioConfig};
use shockdual_cli::error::CliResult;

#[derive(Parser)]
#[command(name = "shockdual", version, about = "Euler shock scenarios and their images under the projective time maps")]
struct Cli {
    /// Scenario file; defaults apply when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides `[check] seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Treat warnings as failures.
    #[arg(long, global = true)]
    strict: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact solution of the configured two-state problem.
    Riemann,
    /// Finite-volume run of the configured initial data.
    Simulate,
    /// Maps a stored run through the configured group element.
    Transform {
        /// Manifest of the source run.
        #[arg(long)]
        input: PathBuf,
    },
    /// Jump, dual, charge and residual checks on a stored run.
    Check {
        #[arg(long)]
        input: PathBuf,
    },
    /// Explosion, its image and the checks on both.
    DemoDuality,
}

fn execute(cli: &Cli) -> CliResult<Outcome> {
    let cfg = match &cli.config {
        Some(path) => config::load(path)?,
        None => ScenarioConfig::default(),
    };
    let seed = cli.seed.unwrap_or(cfg.check.seed);
    match &cli.command {
        Command::Riemann => riemann::run(&cfg, &cli.out),
        Command::Simulate => simulate::run(&cfg, &cli.out),
        Command::Transform { input } => transform::run(&cfg, input, &cli.out),
        Command::Check { input } => check::run(&cfg, input, &cli.out, seed),
        Command::DemoDuality => demo::run(&cfg, &cli.out, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            ExitCode::from(outcome.exit_code(cli.strict) as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

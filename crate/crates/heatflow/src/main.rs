use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use heatflow::commands::{self, Axis, Options, Outcome, ToyName, ToyParams};
use heatflow::{CliError, Engine, ScenarioConfig};

/// Heat flow between coherent spins and a repeated-collision bath.
#[derive(Debug, Parser)]
#[command(name = "heatflow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: Global,
}

#[derive(Debug, Args)]
struct Global {
    /// Scenario file (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for CSV output.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Override the scenario's engine.
    #[arg(long, global = true, value_enum)]
    engine: Option<Engine>,
    /// Reserved; the dynamics are deterministic.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Suppress the report on stdout.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate a scenario and write its trajectory CSV.
    Run,
    /// Re-run a scenario over a list of parameter values.
    Sweep {
        #[arg(long, value_enum)]
        axis: Axis,
        /// Comma-separated values; `pi` multiples allowed, orders as `3-2-1`.
        #[arg(long, value_delimiter = ',')]
        values: Vec<String>,
    },
    /// Check the resource inequalities at every collision.
    Audit,
    /// Compare the collision engine with the master equation.
    Compare,
    /// Evaluate a closed-form toy model against direct simulation.
    Toy {
        #[arg(value_enum, default_value = "all")]
        name: ToyName,
        /// Coherence strength C of the single-spin and swap toys.
        #[arg(long)]
        strength: Option<f64>,
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        beta_s: Option<f64>,
        #[arg(long)]
        beta_m: Option<f64>,
    },
}

fn config(global: &Global) -> Result<ScenarioConfig, CliError> {
    let path = global.config.as_ref().ok_or_else(|| CliError::Parse("--config is required".into()))?;
    ScenarioConfig::load(path)
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let opts = Options { out: cli.global.out.clone(), engine: cli.global.engine };
    match &cli.command {
        Command::Run => commands::run(&config(&cli.global)?, &opts),
        Command::Sweep { axis, values } => commands::sweep(&config(&cli.global)?, *axis, values, &opts),
        Command::Audit => commands::audit(&config(&cli.global)?, &opts),
        Command::Compare => commands::compare(&config(&cli.global)?, &opts),
        Command::Toy { name, strength, lambda, alpha, theta, beta_s, beta_m } => {
            let params = ToyParams {
                strength: *strength,
                lambda: *lambda,
                alpha: *alpha,
                theta: *theta,
                beta_s: *beta_s,
                beta_m: *beta_m,
            };
            commands::toy(*name, &params, &opts)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            if !cli.global.quiet {
                print!("{}", out.report);
                for f in &out.files {
                    println!("wrote {}", f.display());
                }
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("heatflow: {e}");
            e.into()
        }
    }
}

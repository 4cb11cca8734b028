use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use ratchet::config::{Experiment, Overrides, RunConfig};
use ratchet::experiment::run_experiment;
use ratchet::plot::plot;
use ratchet::AppError;

#[derive(Parser)]
#[command(name = "ratchet", version, about = "Cultural-evolution and portrait-evolution experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Agent society with optional chaining and learning.
    RunEvoc(RunArgs),
    /// Agent society with scheduled fitness shifts and adaptive mutation.
    RunCfEvoc(RunArgs),
    /// Portrait evolution against a sitter image and face mask.
    RunPortrait(RunArgs),
    /// Fitness of every single-step action.
    OracleFitness(RunArgs),
    /// Plot CSV columns as SVG.
    Plot(PlotArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Input CSV; repeat for several files.
    #[arg(long = "in", required = true)]
    inputs: Vec<PathBuf>,
    /// Comma-separated column names.
    #[arg(long, value_delimiter = ',', required = true)]
    columns: Vec<String>,
    #[arg(long)]
    svg: PathBuf,
}

fn execute(experiment: Experiment, args: RunArgs) -> Result<(), AppError> {
    let overrides = Overrides {
        seed: args.seed,
        replicates: args.replicates,
        output_dir: args.out,
    };
    let cfg = RunConfig::resolve(args.config.as_deref(), experiment, &overrides)?;
    eprintln!("# effective configuration\n{}", cfg.to_toml());
    let outcome = run_experiment(&cfg)?;
    println!(
        "{} run(s) written to {}",
        outcome.manifest.runs.len(),
        outcome.output_dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::RunEvoc(a) => execute(Experiment::Evoc, a),
        Command::RunCfEvoc(a) => execute(Experiment::CfEvoc, a),
        Command::RunPortrait(a) => execute(Experiment::Portrait, a),
        Command::OracleFitness(a) => execute(Experiment::Oracle, a),
        Command::Plot(a) => plot(&a.inputs, &a.columns, &a.svg),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

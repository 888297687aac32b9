use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use replica_cli::{cmd_eval, cmd_experiment, cmd_repro_tables, cmd_run, EXIT_USAGE};

/// Evolve variable-length prefix arithmetic programs toward a target value.
#[derive(Parser)]
#[command(name = "replica", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one genome, e.g. `eval "* 10 10" --inputs 10,20,30 --target 100`.
    Eval {
        /// Space-separated prefix tokens; operands are values from --inputs.
        #[arg(allow_hyphen_values = true)]
        genome: String,
        /// Comma-separated input operands.
        #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
        inputs: Vec<i64>,
        /// Desired output.
        #[arg(long, allow_hyphen_values = true)]
        target: i64,
    },
    /// Execute a single run and write its artifacts.
    Run {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Seed for this run; defaults to the config's base_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; overrides experiment.output_dir.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Execute every run of a batch and write the summary.
    Experiment {
        /// Experiment config (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides experiment.output_dir.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check the embedded reference programs against the evaluator.
    ReproTables,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mut out, mut err) = (io::stdout().lock(), io::stderr().lock());
    let code = match cli.command {
        Command::Eval { genome, inputs, target } => cmd_eval(&mut out, &mut err, &genome, &inputs, target),
        Command::Run { config, seed, output } => cmd_run(&mut out, &mut err, &config, seed, output),
        Command::Experiment { config, output } => cmd_experiment(&mut out, &mut err, &config, output),
        Command::ReproTables => cmd_repro_tables(&mut out),
    };
    match code {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

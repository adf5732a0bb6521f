use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod error;


#[derive(Debug, Parser)]
#[command(name = "remanlca", version, about = "Emission inventories for virgin and remanufactured devices")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Emission factor JSON; defaults to the built-in catheter factors.
    #[arg(long, global = true)]
    pub factors: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Md,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check product system documents against the rubric and factor store.
    Validate(commands::ValidateArgs),
    /// Emission breakdown of one product system.
    Compute(commands::ComputeArgs),
    /// Per-category comparison of two product systems.
    Compare(commands::CompareArgs),
    /// Vary one of location (L), rejection rate (R) or turns (N).
    Sweep(commands::SweepArgs),
    /// Evaluate named scenarios.
    Scenario(commands::ScenarioArgs),
    /// Size buy-back schemes and optionally simulate them.
    Buyback(commands::BuybackArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(a) => commands::validate(&cli.global, a),
        Command::Compute(a) => commands::compute(&cli.global, a),
        Command::Compare(a) => commands::compare(&cli.global, a),
        Command::Sweep(a) => commands::sweep(&cli.global, a),
        Command::Scenario(a) => commands::scenario(&cli.global, a),
        Command::Buyback(a) => commands::buyback(&cli.global, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("remanlca: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

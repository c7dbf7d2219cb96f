mod commands;
mod generate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "tenseq", version, about = "Contraction sequences for tensor networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write benchmark instances and a manifest.
    Generate(generate::GenerateArgs),
    /// Run one solver on one instance.
    Solve(SolveArgs),
    /// Translate between decompositions, orderings and sequences.
    Convert(ConvertArgs),
    /// Contract a numeric network.
    Contract(ContractArgs),
    /// Run every algorithm on every manifest instance.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ArtifactKind {
    Td,
    Eo,
    Sequence,
}

#[derive(Args)]
pub struct SolveArgs {
    /// `.gr` graph or network JSON.
    pub instance: PathBuf,
    #[arg(long, default_value = "exact", value_parser = ["exact", "min-fill", "min-degree"])]
    pub algorithm: String,
    /// Shell command speaking `.gr` on stdin and `.td` on stdout; replaces --algorithm.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = 900.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Directory for artifacts and `results.jsonl`.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
}

#[derive(Args)]
pub struct ConvertArgs {
    /// `.td`, ordering JSON or sequence JSON.
    pub artifact: PathBuf,
    /// Instance the artifact belongs to.
    #[arg(long)]
    pub instance: PathBuf,
    #[arg(long, value_enum)]
    pub to: ArtifactKind,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args)]
pub struct ContractArgs {
    /// Numeric network JSON.
    pub network: PathBuf,
    #[arg(long, conflicts_with = "end_to_end", required_unless_present = "end_to_end")]
    pub sequence: Option<PathBuf>,
    /// Compute an optimal sequence first and report the combined time.
    #[arg(long)]
    pub end_to_end: bool,
    /// Compare against a state-vector simulation of the embedded circuit.
    #[arg(long)]
    pub oracle: bool,
    /// Seconds, for the solve phase of --end-to-end.
    #[arg(long, default_value_t = 900.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Trace JSON file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cap on intermediate tensor entries.
    #[arg(long, default_value_t = tenseq::executor::DEFAULT_MAX_ENTRIES)]
    pub max_entries: usize,
}

#[derive(Args)]
pub struct BenchArgs {
    pub manifest: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "exact")]
    pub algorithms: Vec<String>,
    /// Adds an `external` algorithm running this shell command.
    #[arg(long)]
    pub solver_cmd: Option<String>,
    /// Seconds per (instance, algorithm) job.
    #[arg(long, default_value_t = 900.0)]
    pub timeout: f64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Run jobs one at a time.
    #[arg(long)]
    pub exclusive: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Format of the aggregate printed on stdout.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

/// Exit status of a command that ran to completion.
pub enum Outcome {
    Done,
    TimedOut,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate::run(a),
        Command::Solve(a) => commands::solve(a),
        Command::Convert(a) => commands::convert(a),
        Command::Contract(a) => commands::contract(a),
        Command::Bench(a) => commands::bench(a),
    };
    match result {
        Ok(Outcome::Done) => ExitCode::SUCCESS,
        Ok(Outcome::TimedOut) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

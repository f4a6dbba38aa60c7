use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use kvtherm_cli::{execute, Command, Options};

#[derive(Parser)]
#[command(name = "kvtherm", version, about = "1D thermoviscoelastic simulator and estimate checks")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,

    /// Configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Number of randomized trials for moser-check.
    #[arg(long, global = true)]
    trials: Option<usize>,

    /// KEY=VALUE, where KEY is section.key or an unambiguous key. Repeatable.
    #[arg(long = "override", global = true)]
    overrides: Vec<String>,
}

#[derive(Subcommand, Clone, Copy)]
enum Cmd {
    /// Simulate and write snapshots and functionals.
    Run,
    /// Simulate and evaluate the estimate ledger.
    Verify,
    /// Manufactured-solution convergence studies.
    Mms,
    /// Vary one parameter over a list of values.
    Sweep,
    /// Randomized trial of the Moser recursion.
    MoserCheck,
    /// Ehrling and Gagliardo-Nirenberg probes over a cosine family.
    Probe,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let command = match cli.command {
        Cmd::Run => Command::Run,
        Cmd::Verify => Command::Verify,
        Cmd::Mms => Command::Mms,
        Cmd::Sweep => Command::Sweep,
        Cmd::MoserCheck => Command::MoserCheck,
        Cmd::Probe => Command::Probe,
    };
    let opts = Options {
        config: cli.config,
        out: cli.out,
        seed: cli.seed,
        trials: cli.trials,
        overrides: cli.overrides,
    };
    ExitCode::from(execute(command, &opts) as u8)
}

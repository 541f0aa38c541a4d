//! `accredia`: accredited analogue quantum simulation from the command
//! line. Subcommands run the full protocol, benchmark the approximate
//! inversion, check the twirl identity, evaluate the advantage preset, and
//! audit trap detection probabilities.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "accredia", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the accreditation protocol from a JSON config.
    Accredit(RunArgs),
    /// Sweep the inverted subcircuit's slice count and emit Choi distances.
    InvertBench(RunArgs),
    /// Print the twirl-identity residual of a Hamiltonian file.
    TwirlCheck(TwirlArgs),
    /// Accredit a square-lattice preset and report the advantage verdict.
    Advantage(RunArgs),
    /// Tabulate exact trap detection probabilities for injected Pauli errors.
    TrapAudit(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON config file.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Directory for output artifacts.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Overrides the config's worker-thread count.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Write only JSON artifacts.
    #[arg(long)]
    json: bool,
    /// Write only CSV artifacts.
    #[arg(long)]
    csv: bool,
    /// Omit the timestamp field so outputs are byte-stable.
    #[arg(long)]
    no_timestamp: bool,
}

impl RunArgs {
    fn write_json(&self) -> bool {
        self.json || !self.csv
    }

    fn write_csv(&self) -> bool {
        self.csv || !self.json
    }
}

#[derive(Args)]
struct TwirlArgs {
    /// Hamiltonian JSON file: a list of {"coeff": number, "pauli": word}.
    #[arg(long)]
    hamiltonian: PathBuf,
    /// Print the residual as JSON instead of plain text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Accredit(args) => commands::accredit(&args),
        Command::InvertBench(args) => commands::invert_bench(&args),
        Command::TwirlCheck(args) => commands::twirl_check(&args),
        Command::Advantage(args) => commands::advantage(&args),
        Command::TrapAudit(args) => commands::trap_audit(&args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

/// 2 for validation/config errors, 3 for capacity limits, 1 otherwise.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<accredia::Error>() {
            return match e {
                accredia::Error::Capacity { .. } => 3,
                _ => 2,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return 2;
        }
    }
    // Config-shape problems raised by the CLI itself count as validation.
    if err.chain().any(|c| c.to_string().contains("config")) {
        return 2;
    }
    1
}

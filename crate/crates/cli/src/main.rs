use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use shuttle_cli::commands::{self, Context};
use shuttle_cli::config::ScenarioConfig;
use shuttle_cli::CliError;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Feasibility bounds and verdict of the configured protocol.
    Check,
    /// Trajectory tables of the sweep protocols.
    Design,
    /// Time-averaged energies over the sweep.
    Energy,
    /// One wavepacket run of the configured protocol.
    Simulate,
    /// Wavepacket fidelity over the sweep.
    Sweep,
}

/// Design and verify fast atom transport in an optical tweezer.
#[derive(Debug, Parser)]
#[command(name = "shuttle", version)]
struct Cli {
    command: Command,
    /// Scenario file (TOML).
    config: PathBuf,
    /// Output directory; overrides `output.dir`.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
    /// Seed of the randomized optimality audit.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Invalid(e.to_string()))?;
    }
    let config = ScenarioConfig::load(&cli.config)?;
    let ctx = Context::new(&config, cli.out_dir, cli.seed)?;
    match cli.command {
        Command::Check => commands::check(&ctx),
        Command::Design => commands::design(&ctx),
        Command::Energy => commands::energy(&ctx),
        Command::Simulate => commands::simulate_cmd(&ctx),
        Command::Sweep => commands::sweep(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

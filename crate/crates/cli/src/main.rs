//! `photon-gate`: command-line front end for the gate simulations.

mod commands;
mod config;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::CliError;
use config::{is_override, RunConfig};

const THREADS_VAR: &str = "PHOTON_GATE_THREADS";

#[derive(Parser)]
#[command(
    name = "photon-gate",
    version,
    about = "Conditional phase and fidelity of photon-photon gates with transverse mode effects",
    after_help = "Settings come from the defaults, then --config FILE ([section] key = value), then \
                  --section.key=value flags. Multiples of pi are accepted (pi, pi/2, 4pi).\n\
                  PHOTON_GATE_THREADS sets the worker count.\n\
                  Exit codes: 0 success, 1 usage error, 2 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// INI configuration file.
    #[arg(short, long, global = true)]
    config: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the accumulated phase over (z, ρ).
    PhaseField(Common),
    /// One gate evaluation on the phase-only route.
    Fidelity(Common),
    /// Strength sweep at fixed separation (CSV, optional SVG).
    Sweep(Common),
    /// Strength and fidelity at the target phase against separation.
    Tradeoff(Common),
    /// Split-step propagation compared with the phase-only route.
    Propagate(Common),
    /// Transverse mode-mixing tensor and its Schmidt spectrum.
    Modes(Common),
    /// Run the acceptance criteria.
    Validate(Common),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(e.to_string()))
}

fn run() -> Result<(), CliError> {
    let (overrides, args): (Vec<String>, Vec<String>) = std::env::args().partition(|a| is_override(a));
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    configure_threads()?;

    let common = match &cli.command {
        Command::PhaseField(c)
        | Command::Fidelity(c)
        | Command::Sweep(c)
        | Command::Tradeoff(c)
        | Command::Propagate(c)
        | Command::Modes(c)
        | Command::Validate(c) => c,
    };
    let mut cfg = RunConfig::default();
    if let Some(path) = &common.config {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        cfg.apply_ini(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    }
    for o in &overrides {
        cfg.apply_override(o).map_err(|e| CliError::Usage(e.to_string()))?;
    }

    match cli.command {
        Command::PhaseField(_) => commands::phase_field(&cfg),
        Command::Fidelity(_) => commands::fidelity(&cfg),
        Command::Sweep(_) => commands::sweep(&cfg),
        Command::Tradeoff(_) => commands::tradeoff(&cfg),
        Command::Propagate(_) => commands::propagate(&cfg),
        Command::Modes(_) => commands::modes(&cfg),
        Command::Validate(_) => commands::validate(&cfg),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("photon-gate: {}", e.message());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

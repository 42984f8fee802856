use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use vacuum_refine::{cmd_diag, cmd_filter_run, cmd_refine, cmd_sweep, configure_threads, CliError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "vacuum-refine", version, about = "Adiabatic vacuum preparation and vacuum filtering experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Adiabatic sweep followed by a hold; writes the <Z> trajectory.
    Sweep(Common),
    /// Sweep, one-ancilla tagging at t = T, then hold.
    FilterRun(Common),
    /// Sweep, then repeated ancilla filtering toward the ground state.
    Refine(Common),
    /// Spectrum and ground-state report for the configured model.
    Diag(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    /// Overrides estimation.seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides output.prefix.
    #[arg(long)]
    out: Option<String>,
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::from_file(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.estimation.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.output_prefix = out.clone();
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<String, CliError> {
    configure_threads()?;
    match cli.command {
        Command::Sweep(c) => Ok(cmd_sweep(&load(&c)?)?.summary()),
        Command::FilterRun(c) => Ok(cmd_filter_run(&load(&c)?)?.summary()),
        Command::Refine(c) => Ok(cmd_refine(&load(&c)?)?.summary()),
        Command::Diag(c) => {
            let report = cmd_diag(&load(&c)?)?;
            let mut out = report.text;
            for f in &report.files {
                out.push_str(&format!("wrote {}\n", f.display()));
            }
            Ok(out)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(summary) => {
            print!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

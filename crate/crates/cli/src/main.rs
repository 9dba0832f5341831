mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use error::CliError;
use output::{write_json, Manifest, Versions};

#[derive(Parser)]
#[command(name = "rankone", version, about = "Dispersive-equation experiments on compact rank-one symmetric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML file with default settings; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    settings: ExperimentConfig,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Propagate a radial series and evaluate it at the requested times.
    Propagate,
    /// Maximal function over a time grid, with Lp and Sobolev norms.
    MaximalScan,
    /// Divergence scan of the Gauss-sum counterexample over a list of N.
    Counterexample,
    /// Triple-count table and L6 checks on the torus.
    Strichartz,
    /// Arithmetic tables, the congruence set and Gauss-sum comparisons.
    Nt,
    /// Transference residual against Schrodinger over dyadic blocks.
    Transfer,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Propagate => "propagate",
            Command::MaximalScan => "maximal-scan",
            Command::Counterexample => "counterexample",
            Command::Strichartz => "strichartz",
            Command::Nt => "nt",
            Command::Transfer => "transfer",
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let start = Instant::now();
    let file = match &cli.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    let cfg = cli.settings.over(file).resolve();
    std::fs::create_dir_all(&cfg.out_dir)?;
    let record = match cli.command {
        Command::Propagate => commands::propagate_cmd(&cfg)?,
        Command::MaximalScan => commands::maximal_scan_cmd(&cfg)?,
        Command::Counterexample => commands::counterexample_cmd(&cfg)?,
        Command::Strichartz => commands::strichartz_cmd(&cfg)?,
        Command::Nt => commands::nt_cmd(&cfg)?,
        Command::Transfer => commands::transfer_cmd(&cfg)?,
    };
    let manifest = Manifest {
        command: cli.command.name(),
        config: &cfg,
        versions: Versions::current(),
        space: record.space.as_ref().map(serde_json::to_value).transpose()?,
        grids: record.grids,
        tolerances: record.tolerances,
        outputs: record.outputs,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    write_json(&cfg.out_dir, "manifest.json", &manifest)?;
    for name in &manifest.outputs {
        println!("{}", cfg.out_dir.join(name).display());
    }
    Ok(())
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
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rankone: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

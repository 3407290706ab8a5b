use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spinent_core::experiment::{self, figures};

#[derive(Parser)]
#[command(
    name = "spinent",
    version,
    about = "Entanglement dynamics of small spin networks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a sweep config and write its output.
    Run {
        config: PathBuf,
        /// Write results here instead of the config's `output.path`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parse and check a sweep config without running it.
    Validate { config: PathBuf },
    /// Print a bundled figure config (fig1 … fig7, fig2e).
    Figures {
        name: Option<String>,
        /// Write the config to a file instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// List the bundled names.
        #[arg(long)]
        list: bool,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), String> {
    match cli.command {
        Command::Run { config, out } => {
            let summary =
                experiment::run_config(&config, out.as_deref()).map_err(|e| e.to_string())?;
            let p = &summary.provenance;
            println!(
                "{} {} seed={} rows={}",
                p.tool, p.tool_version, p.seed, summary.rows
            );
            for file in &summary.files {
                println!("wrote {}", file.display());
            }
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = experiment::validate(&config).map_err(|e| e.to_string())?;
            let points = cfg.field_grid.len();
            let initial = match &cfg.initial {
                experiment::InitialSelection::Ensemble => {
                    format!("ensemble of {}", 1usize << cfg.n_sites())
                }
                experiment::InitialSelection::States(s) => s.len().to_string(),
            };
            println!(
                "ok: {} spins, {} field points, {} initial states, {} times, {} pairs",
                cfg.n_sites(),
                points,
                initial,
                cfg.times.steps,
                cfg.pairs.len()
            );
            Ok(())
        }
        Command::Figures { name, out, list } => {
            if list {
                for n in figures::names() {
                    println!("{n}");
                }
                return Ok(());
            }
            let name = name.ok_or("figure name required (or --list)")?;
            let text = figures::bundled_config(&name).ok_or_else(|| {
                format!(
                    "unknown figure {name:?}; available: {}",
                    figures::names().collect::<Vec<_>>().join(", ")
                )
            })?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| format!("{}: {e}", path.display()))
                }
                None => {
                    print!("{text}");
                    Ok(())
                }
            }
        }
    }
}

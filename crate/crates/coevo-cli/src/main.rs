use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use coevo_cli::config::{parse_run_config, parse_sweep_config};
use coevo_cli::{run, sweep, verify};

/// Simulator and verification toolkit for coupled opinion-action dynamics.
#[derive(Parser)]
#[command(name = "coevo", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one seeded simulation and write its artifacts.
    Run {
        /// Path to a `key = value` run config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory root.
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Run a (epsilon x phi x seed) grid and write the phase-map CSV.
    Sweep {
        /// Path to a `key = value` sweep config.
        #[arg(long)]
        config: PathBuf,
        /// Output directory root.
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Worker threads for independent cells.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Run the invariant suite on one configured instance.
    Verify {
        /// Path to a `key = value` run config.
        #[arg(long)]
        config: PathBuf,
    },
}

const EXIT_CONFIG_OR_IO: u8 = 1;
const EXIT_INVARIANT_VIOLATION: u8 = 2;

fn read_config(path: &PathBuf) -> Result<(String, String), ExitCode> {
    let label = path.display().to_string();
    match fs::read_to_string(path) {
        Ok(text) => Ok((text, label)),
        Err(err) => {
            eprintln!("{label}: {err}");
            Err(ExitCode::from(EXIT_CONFIG_OR_IO))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let (text, label) = match read_config(&config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let cfg = match parse_run_config(&text, &label) {
                Ok(cfg) => cfg,
                Err(err) => {
                    eprintln!("{err}");
                    return ExitCode::from(EXIT_CONFIG_OR_IO);
                }
            };
            match run::run_command(&cfg, &out) {
                Ok(outcome) => {
                    let report = &outcome.report;
                    println!(
                        "regime={} stabilization_time={} leaders={} out={}",
                        report.regime.as_str(),
                        report
                            .stabilization_time
                            .map(|t| t.to_string())
                            .unwrap_or_else(|| "none".into()),
                        report.leaders.len(),
                        outcome.dir.display()
                    );
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("run failed: {err:#}");
                    ExitCode::from(EXIT_CONFIG_OR_IO)
                }
            }
        }
        Command::Sweep { config, out, jobs } => {
            let (text, label) = match read_config(&config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let cfg = match parse_sweep_config(&text, &label) {
                Ok(cfg) => cfg,
                Err(err) => {
                    eprintln!("{err}");
                    return ExitCode::from(EXIT_CONFIG_OR_IO);
                }
            };
            match sweep::sweep_command(&cfg, &out, jobs) {
                Ok(path) => {
                    let cell_count =
                        cfg.epsilon_grid.len() * cfg.phi_grid.len() * cfg.seeds.len();
                    println!("cells={cell_count} out={}", path.display());
                    ExitCode::SUCCESS
                }
                Err(err) => {
                    eprintln!("sweep failed: {err:#}");
                    ExitCode::from(EXIT_CONFIG_OR_IO)
                }
            }
        }
        Command::Verify { config } => {
            let (text, label) = match read_config(&config) {
                Ok(v) => v,
                Err(code) => return code,
            };
            let cfg = match parse_run_config(&text, &label) {
                Ok(cfg) => cfg,
                Err(err) => {
                    eprintln!("{err}");
                    return ExitCode::from(EXIT_CONFIG_OR_IO);
                }
            };
            let outcome = verify::verify_command(&cfg);
            for line in &outcome.lines {
                println!("{line}");
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_INVARIANT_VIOLATION)
            }
        }
    }
}

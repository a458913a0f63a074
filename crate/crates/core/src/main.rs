use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gpeps::experiments::{parse_config, resolve_out_dir, run_experiment, Experiment, OUT_DIR_ENV};

#[derive(Parser)]
#[command(name = "gpeps", version, about = "Gaussian PEPS entanglement-decay experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment from a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory (beats GPEPS_OUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write floats as hexadecimal literals.
        #[arg(long)]
        exact_floats: bool,
    },
    /// List the available experiments.
    List,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::List => {
            for e in Experiment::ALL {
                println!("{:<16} {}", e.name(), e.description());
            }
            ExitCode::SUCCESS
        }
        Command::Run {
            config,
            seed,
            out,
            exact_floats,
        } => {
            let text = match std::fs::read_to_string(&config) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            let parsed = match parse_config(&text) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {}: {e}", config.display());
                    return ExitCode::from(2);
                }
            };
            for w in &parsed.warnings {
                log::warn!("{}: {w}", config.display());
            }
            let mut cfg = parsed.config;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let env = std::env::var(OUT_DIR_ENV).ok();
            let dir = resolve_out_dir(out.as_deref(), env.as_deref(), &cfg);
            match run_experiment(&cfg, &dir, exact_floats) {
                Ok(outcome) => {
                    for c in &outcome.checks {
                        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    println!("wrote {}", outcome.out_dir.display());
                    if outcome.passed {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(1)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(2)
                }
            }
        }
    }
}

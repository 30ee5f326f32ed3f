use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use scatter2d_cli::commands;
use scatter2d_cli::config::{Engine, ExperimentConfig};
use scatter2d_cli::{exit_code_for, exit_codes};
use std::path::PathBuf;
use std::process::ExitCode;

/// Far-field synthesis and sampling-method reconstruction for 2D acoustic
/// scattering.
#[derive(Parser)]
#[command(name = "scatter2d", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the forward problem of a config and write a far-field file.
    Forward {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's forward engine (bie|analytic).
        #[arg(long)]
        engine: Option<String>,
    },
    /// Add calibrated relative noise to a far-field file.
    Perturb {
        infile: PathBuf,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the configured indicators over the sampling grid.
    Reconstruct {
        infile: PathBuf,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Forward + perturb + reconstruct with all four indicators.
    Compare {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the config's noise seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the config's forward engine (bie|analytic).
        #[arg(long)]
        engine: Option<String>,
    },
    /// Run the data-level verification suite on a far-field file.
    Verify {
        infile: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    return ExitCode::SUCCESS;
                }
                _ => exit_codes::USAGE,
            };
            eprint!("{e}");
            return ExitCode::from(code as u8);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}

fn load_config(
    path: &PathBuf,
    engine: Option<&String>,
    seed: Option<u64>,
) -> scatter2d::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(engine) = engine {
        cfg.engine = Engine::parse(engine)?;
    }
    if let Some(seed) = seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> scatter2d::Result<i32> {
    match cli.command {
        Command::Forward {
            config,
            out,
            engine,
        } => {
            let cfg = load_config(&config, engine.as_ref(), None)?;
            let outcome = commands::cmd_forward(&cfg, &out)?;
            let residuals = outcome.report.residuals.as_ref().expect("always filled");
            println!(
                "forward: wrote {} (N = {}, reciprocity {:.3e}, unitarity {:.3e})",
                outcome.file.display(),
                cfg.n_dirs,
                residuals.reciprocity.unwrap_or(f64::NAN),
                residuals.unitarity.unwrap_or(f64::NAN),
            );
            Ok(exit_codes::SUCCESS)
        }
        Command::Perturb {
            infile,
            delta,
            seed,
            out,
        } => {
            let outcome = commands::cmd_perturb(&infile, delta, seed, &out)?;
            println!(
                "perturb: wrote {} (requested delta {}, measured {:.12})",
                outcome.file.display(),
                delta,
                outcome.report.measured_relative_error.unwrap_or(f64::NAN),
            );
            Ok(exit_codes::SUCCESS)
        }
        Command::Reconstruct {
            infile,
            config,
            out,
        } => {
            let cfg = load_config(&config, None, None)?;
            let outcome = commands::cmd_reconstruct(&infile, &cfg, &out)?;
            println!(
                "reconstruct: wrote {} map file(s) to {}",
                outcome.files.len(),
                out.display()
            );
            for (name, entry) in &outcome.report.argmax {
                println!(
                    "  {name}: argmax at ({:.4}, {:.4}) value {:.6e}",
                    entry.x, entry.y, entry.value
                );
            }
            Ok(exit_codes::SUCCESS)
        }
        Command::Compare {
            config,
            out,
            seed,
            engine,
        } => {
            let cfg = load_config(&config, engine.as_ref(), seed)?;
            let outcome = commands::cmd_compare(&cfg, &out)?;
            println!(
                "compare: forward {:.2}s, indicators {:.2}s, {} file(s) in {}",
                outcome.forward_seconds,
                outcome.reconstruct_seconds,
                outcome.files.len(),
                out.display()
            );
            Ok(exit_codes::SUCCESS)
        }
        Command::Verify { infile, out } => {
            let outcome = commands::cmd_verify(&infile, out.as_deref())?;
            for check in &outcome.checks {
                println!(
                    "{} {}: {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if outcome.all_pass() {
                println!("verify: all checks passed");
                Ok(exit_codes::SUCCESS)
            } else {
                println!("verify: checks failed");
                Ok(exit_codes::NUMERICAL)
            }
        }
    }
}

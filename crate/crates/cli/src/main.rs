use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use qbrown_cli::report::number;
use qbrown_cli::{acceptance, load_config, run_scenario, scales, Error};

/// Quantum Brownian motion scenarios: dispersion laws, density PDEs and
/// equilibrium densities.
#[derive(Parser)]
#[command(name = "qbrown", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write CSVs plus manifest.txt.
    Run {
        config: PathBuf,
        /// Output directory, overriding `output.dir`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for independent cells.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Run the acceptance suite, one verdict line per criterion.
    Accept {
        /// Only the criteria with budgets of at most 10 s.
        #[arg(long)]
        quick: bool,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
        jobs: u16,
    },
    /// Print the derived length and time scales of a scenario file.
    Scales { config: PathBuf },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("qbrown: {e}");
    ExitCode::from(e.exit_code())
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config, out, jobs } => {
            let mut cfg = match load_config(&config) {
                Ok(c) => c,
                Err(e) => return fail(&e),
            };
            if let Some(dir) = out {
                cfg.set_output_dir(dir);
            }
            match run_scenario(&cfg, jobs as usize) {
                Ok(report) => {
                    for c in &report.manifest.checks {
                        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    if let Some(cause) = &report.manifest.failure {
                        eprintln!("qbrown: {} failed: {cause}", cfg.scenario.name());
                    }
                    println!("wrote {}", report.out_dir.join("manifest.txt").display());
                    ExitCode::from(report.exit_code())
                }
                Err(e) => fail(&e),
            }
        }
        Command::Accept { quick, jobs } => {
            let ids = if quick { acceptance::quick_ids() } else { acceptance::all_ids() };
            let verdicts = acceptance::run(&ids, jobs as usize);
            for v in &verdicts {
                println!("{v}");
            }
            let failed = verdicts.iter().filter(|v| !v.passed()).count();
            println!("{} passed, {failed} failed", verdicts.len() - failed);
            ExitCode::from(u8::from(failed > 0))
        }
        Command::Scales { config } => match load_config(&config) {
            Ok(cfg) => {
                let found = scales(&cfg.params);
                if found.is_empty() {
                    println!("no derived scales: T = 0 and b = 0");
                }
                for (name, value) in found {
                    println!("{name} = {}", number(value));
                }
                ExitCode::SUCCESS
            }
            Err(e) => fail(&e),
        },
    }
}

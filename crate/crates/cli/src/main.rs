use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser};
use qtm_cli::config::{key_reference, Experiment};
use qtm_cli::{execute, Invocation, EXIT_CONFIG};

/// Two-stroke quantum thermal machine experiments.
///
/// Writes <out>/<experiment>.csv with a provenance header, plus a JSON summary
/// unless output.json = false. Exit codes: 0 success, 1 configuration or
/// validation error, 2 numerical non-convergence (see <out>/<experiment>.log),
/// 3 I/O error.
#[derive(Parser, Debug)]
#[command(name = "qtm", version)]
struct Cli {
    /// Experiment to run, or `keys` to print the configuration reference:
    /// sweep-tau, optimal-time-curve, frontier, freq-maximize, mediator-compare,
    /// advantage, otto-compare, swap-compare, validate-oracle, appendix-d.
    experiment: String,

    /// Key-value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,

    /// Override one key, e.g. --set machine.g=0.5 (repeatable, applied in order).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    sets: Vec<String>,

    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,

    /// Worker threads (overrides QTM_THREADS; 0 uses all cores).
    #[arg(long)]
    threads: Option<usize>,

    /// Seed for randomized experiments.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let command = Cli::command().after_long_help(key_reference());
    let cli = match command.try_get_matches().and_then(|m| Cli::from_arg_matches(&m)) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    if cli.experiment == "keys" {
        print!("{}", key_reference());
        return ExitCode::SUCCESS;
    }
    let experiment = match cli.experiment.parse::<Experiment>() {
        Ok(e) => e,
        Err(msg) => {
            eprintln!("qtm: {msg}");
            return ExitCode::from(EXIT_CONFIG as u8);
        }
    };
    let inv = Invocation {
        experiment,
        config: cli.config,
        sets: cli.sets,
        out: cli.out,
        threads: cli.threads,
        seed: cli.seed,
    };
    let env = std::env::var("QTM_THREADS").ok();
    match execute(&inv, env.as_deref()) {
        Ok(written) => {
            if let Some(report) = written.report {
                print!("{report}");
            }
            println!("wrote {}", written.csv.display());
            if let Some(json) = written.json {
                println!("wrote {}", json.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("qtm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

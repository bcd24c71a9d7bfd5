//! Experiment runner behind the `qtm` binary.

pub mod config;
pub mod dataset;
pub mod experiments;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use qtm_core::QtmError;

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::experiments::{run_experiment, Output};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug)]
pub enum RunError {
    Config(ConfigError),
    /// A module precondition failed for otherwise well-formed input.
    Validation(QtmError),
    Numerical(String),
    Io(String),
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) | RunError::Validation(_) => EXIT_CONFIG,
            RunError::Numerical(_) => EXIT_NUMERICAL,
            RunError::Io(_) => EXIT_IO,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Config(e) => write!(f, "{e}"),
            RunError::Validation(e) => write!(f, "validation error: {e}"),
            RunError::Numerical(e) => write!(f, "numerical failure: {e}"),
            RunError::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl std::error::Error for RunError {}

impl From<QtmError> for RunError {
    fn from(e: QtmError) -> Self {
        match e {
            QtmError::Numerical(_) | QtmError::NonConvergence { .. } | QtmError::Unconverged(_) => {
                RunError::Numerical(e.to_string())
            }
            other => RunError::Validation(other),
        }
    }
}

/// Parsed command line.
#[derive(Debug, Clone, PartialEq)]
pub struct Invocation {
    pub experiment: Experiment,
    pub config: Option<PathBuf>,
    pub sets: Vec<String>,
    pub out: PathBuf,
    pub threads: Option<usize>,
    pub seed: u64,
}

/// Files written by a successful run.
#[derive(Debug, Clone, PartialEq)]
pub struct Written {
    pub csv: PathBuf,
    pub json: Option<PathBuf>,
    pub report: Option<String>,
}

/// Thread count from the flag, then `QTM_THREADS`, then the rayon default (0).
pub fn thread_count(flag: Option<usize>, env: Option<&str>) -> Result<usize, RunError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    match env.map(str::trim).filter(|s| !s.is_empty()) {
        None => Ok(0),
        Some(s) => s.parse().map_err(|_| {
            RunError::Config(ConfigError {
                origin: None,
                key: Some("QTM_THREADS".into()),
                message: format!("expected a thread count, found `{s}`"),
            })
        }),
    }
}

pub fn load(inv: &Invocation) -> Result<ExperimentConfig, RunError> {
    let text = match &inv.config {
        Some(path) => fs::read_to_string(path).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))?,
        None => String::new(),
    };
    ExperimentConfig::load(inv.experiment, &text, &inv.sets).map_err(RunError::Config)
}

/// Runs the experiment on a pool of `threads` workers without writing anything.
pub fn compute(config: &ExperimentConfig, seed: u64, threads: usize) -> Result<Output, RunError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| RunError::Numerical(format!("thread pool: {e}")))?;
    let out = pool.install(|| run_experiment(config, seed))?;
    if let Some((row, column, value)) = out.dataset.first_non_finite() {
        return Err(RunError::Numerical(format!(
            "row {row}, column `{column}` is not finite ({value})"
        )));
    }
    Ok(out)
}

pub fn sidecar_log(out: &Path, experiment: Experiment) -> PathBuf {
    out.join(format!("{}.log", experiment.name()))
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|e| RunError::Io(format!("{}: {e}", path.display())))
}

/// Loads, runs and writes `<out>/<experiment>.csv` (and `.json`). On numerical
/// failure the diagnostics go to `<out>/<experiment>.log`.
pub fn execute(inv: &Invocation, env_threads: Option<&str>) -> Result<Written, RunError> {
    let threads = thread_count(inv.threads, env_threads)?;
    let config = load(inv)?;
    fs::create_dir_all(&inv.out).map_err(|e| RunError::Io(format!("{}: {e}", inv.out.display())))?;
    let result = compute(&config, inv.seed, threads);
    let out = match result {
        Ok(out) => out,
        Err(e @ RunError::Numerical(_)) => {
            let mut log = dataset::provenance(&config, inv.seed);
            log.push_str(&format!("# error: {e}\n"));
            write(&sidecar_log(&inv.out, inv.experiment), &log)?;
            return Err(e);
        }
        Err(e) => return Err(e),
    };
    let stem = inv.experiment.name();
    let csv = inv.out.join(format!("{stem}.csv"));
    write(&csv, &out.dataset.to_csv(&config, inv.seed))?;
    let json = if config.flag("output.json") {
        let path = inv.out.join(format!("{stem}.json"));
        write(&path, &out.summary.to_json(&config, inv.seed))?;
        Some(path)
    } else {
        None
    };
    Ok(Written {
        csv,
        json,
        report: out.report,
    })
}

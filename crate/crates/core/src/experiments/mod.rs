//! Experiment runner: one TOML config in, CSV tables and `summary.json` out.

mod config;
mod output;
mod runners;

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};

pub use config::{parse_config, EnsembleSource, Experiment, ExperimentConfig, Parameters, ParsedConfig};
pub use output::{hex_float, Cell, Check, Table};
pub use runners::ExperimentResult;

/// Environment variable that overrides the output directory.
pub const OUT_DIR_ENV: &str = "GPEPS_OUT_DIR";

/// `--out`, then `GPEPS_OUT_DIR`, then the config's `output`, then
/// `out/<experiment>`.
pub fn resolve_out_dir(cli: Option<&Path>, env: Option<&str>, cfg: &ExperimentConfig) -> PathBuf {
    cli.map(Path::to_path_buf)
        .or_else(|| env.filter(|s| !s.is_empty()).map(PathBuf::from))
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| Path::new("out").join(cfg.experiment.name()))
}

/// Runs an experiment in memory.
pub fn compute(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    match &cfg.parameters {
        Parameters::SwapDecay { r_i, k_max } => runners::swap_decay(*r_i, *k_max),
        Parameters::GraphLe {
            width,
            height,
            r,
            weak_r,
        } => runners::graph_le(*width, *height, *r, *weak_r),
        Parameters::TransportDecay { source, n_max } => runners::transport_decay(source, *n_max, cfg.seed),
        Parameters::Percolation {
            width,
            height,
            p_values,
            trials,
        } => runners::percolation(*width, *height, p_values, *trials, cfg.seed),
        Parameters::RepeaterChain {
            lambdas,
            n_links,
            trials,
        } => runners::repeater_chain(lambdas, *n_links, *trials, cfg.seed),
        Parameters::OracleValidate { r_values, cutoff } => runners::oracle_validate(r_values, *cutoff),
    }
}

#[derive(Debug, Clone, Serialize)]
struct Summary<'a> {
    experiment: Experiment,
    seed: u64,
    parameters: &'a Parameters,
    exact_floats: bool,
    files: Vec<String>,
    results: &'a serde_json::Value,
    checks: &'a [Check],
    passed: bool,
    notes: &'a [String],
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub passed: bool,
}

/// Runs `cfg` and writes one CSV per table plus `summary.json` into `out_dir`.
pub fn run_experiment(cfg: &ExperimentConfig, out_dir: &Path, exact_floats: bool) -> Result<RunOutcome> {
    let res = compute(cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mut files = Vec::new();
    for t in &res.tables {
        files.push(t.write(out_dir, exact_floats)?);
    }
    let passed = res.checks.iter().all(|c| c.passed);
    let summary = Summary {
        experiment: cfg.experiment,
        seed: cfg.seed,
        parameters: &cfg.parameters,
        exact_floats,
        files: files
            .iter()
            .filter_map(|p| p.file_name().map(|s| s.to_string_lossy().into_owned()))
            .collect(),
        results: &res.results,
        checks: &res.checks,
        passed,
        notes: &res.notes,
    };
    let path = out_dir.join("summary.json");
    let text = serde_json::to_string_pretty(&summary).map_err(|e| Error::Internal(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(|e| Error::io(&path, e))?;
    files.push(path);
    Ok(RunOutcome {
        out_dir: out_dir.to_path_buf(),
        files,
        checks: res.checks,
        passed,
    })
}

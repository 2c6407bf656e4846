//! Experiment driver behind the `tpb-bench` binary.
//!
//! A run grid is the product of problems, dimensions, budget factors,
//! algorithms, parameter sweeps, instances and seeds. Results land under the
//! output directory:
//!
//! ```text
//! out/
//!   reference/<instance>_r<res>.front.txt   cached reference fronts
//!   runs/<key>.ledger.jsonl                 {"eval_index", "x", "f"} per line
//!   runs/<key>.trace.csv                    eval_index,indicator_value
//!   runs/<key>.meta.json                    spec, run metadata, final indicator
//!   summary.csv                             one row per grid cell
//!   reports/ecdf_*.csv                      evals_per_dim,fraction
//!   reports/walltime.csv
//!   reports/final_indicator.csv             one column per algorithm
//! ```
//!
//! A run whose `meta.json` exists is skipped on the next invocation.

mod config;
mod experiment;
mod report;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use config::{parse_config_text, read_config_file, ExperimentConfig, KEYS};
pub use experiment::{
    execute_grid, execute_run, expand_grid, load_record, reference_dir, runs_dir, RunRecord, RunSpec,
    RunStatus,
};
pub use report::{emit_reports, load_all_records, ReportFiles};

use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUN_FAILURE: i32 = 1;
pub const EXIT_CONFIG_ERROR: i32 = 2;

/// Command-line flags. Lists are comma separated; flags override `--config`.
#[derive(Debug, Parser)]
#[command(name = "tpb-bench", version, about = "Run and report a TPB benchmark grid")]
pub struct Args {
    /// Kind pairs such as `sphere/ellipsoid`.
    #[arg(long)]
    pub problems: Option<String>,
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long = "budget-factors")]
    pub budget_factors: Option<String>,
    /// Any of `tpb`, `tpb1`, `tpb2`.
    #[arg(long)]
    pub algos: Option<String>,
    #[arg(long = "K")]
    pub k: Option<String>,
    #[arg(long = "D")]
    pub d: Option<String>,
    #[arg(long)]
    pub r1st: Option<String>,
    #[arg(long)]
    pub instances: Option<String>,
    #[arg(long)]
    pub seeds: Option<String>,
    #[arg(long)]
    pub workers: Option<String>,
    #[arg(long)]
    pub out: Option<String>,
    /// Reference-front resolution.
    #[arg(long)]
    pub resolution: Option<String>,
    /// `trust-region` or `nelder-mead`.
    #[arg(long)]
    pub optimizer: Option<String>,
    /// Flat `key = value` file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Only rebuild reports from runs already on disk.
    #[arg(long)]
    pub report_only: bool,
}

impl Args {
    fn overrides(&self) -> Vec<(&'static str, &Option<String>)> {
        vec![
            ("problems", &self.problems),
            ("dims", &self.dims),
            ("budget-factors", &self.budget_factors),
            ("algos", &self.algos),
            ("K", &self.k),
            ("D", &self.d),
            ("r1st", &self.r1st),
            ("instances", &self.instances),
            ("seeds", &self.seeds),
            ("workers", &self.workers),
            ("out", &self.out),
            ("resolution", &self.resolution),
            ("optimizer", &self.optimizer),
        ]
    }

    /// File values, then flag values, on top of the defaults.
    pub fn to_config(&self) -> Result<ExperimentConfig> {
        let mut values: BTreeMap<&'static str, String> = match &self.config {
            Some(path) => read_config_file(path)?,
            None => BTreeMap::new(),
        };
        for (key, value) in self.overrides() {
            if let Some(v) = value {
                values.insert(key, v.clone());
            }
        }
        ExperimentConfig::from_values(&values)
    }
}

/// Runs the grid and the reports; returns the process exit code.
pub fn run_experiment(cfg: &ExperimentConfig) -> i32 {
    let statuses = match execute_grid(cfg) {
        Ok(s) => s,
        Err(e) => {
            log::error!("{e}");
            return match e {
                Error::Config { .. } => EXIT_CONFIG_ERROR,
                _ => EXIT_RUN_FAILURE,
            };
        }
    };
    let failed = statuses
        .iter()
        .filter(|s| matches!(s, RunStatus::Failed { .. }))
        .count();
    let report_code = report_exit_code(cfg);
    if failed > 0 {
        log::error!("{failed} of {} runs failed", statuses.len());
        return EXIT_RUN_FAILURE;
    }
    report_code
}

fn report_exit_code(cfg: &ExperimentConfig) -> i32 {
    match emit_reports(&cfg.out_dir) {
        Ok(files) => {
            log::info!("wrote {} ECDF files under {}", files.ecdf.len(), cfg.out_dir.display());
            EXIT_OK
        }
        Err(e) => {
            log::error!("reports: {e}");
            EXIT_RUN_FAILURE
        }
    }
}

/// Entry point for the binary: parse `args`, execute, return an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG_ERROR } else { EXIT_OK };
        }
    };
    let cfg = match args.to_config() {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_CONFIG_ERROR;
        }
    };
    if args.report_only {
        report_exit_code(&cfg)
    } else {
        run_experiment(&cfg)
    }
}

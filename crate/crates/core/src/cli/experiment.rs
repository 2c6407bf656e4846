use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::ExperimentConfig;
use crate::assess::IndicatorTrace;
use crate::dfo::OptimizerKind;
use crate::problems::{make_problem, KindPair, ProblemInstance, ReferenceCache, ReferenceData};
use crate::tpb::{run_algorithm, Algorithm, RunMeta, TpbConfig};
use crate::{Error, Result};

/// Everything that determines one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    /// `first/second` kind pair.
    pub problem: String,
    pub n: usize,
    pub budget_factor: usize,
    pub algorithm: Algorithm,
    pub k: usize,
    pub degree: u32,
    pub r_1st: f64,
    pub instance: u64,
    pub seed: u64,
    pub optimizer: OptimizerKind,
    pub resolution: usize,
}

impl RunSpec {
    pub fn budget(&self) -> usize {
        self.budget_factor * self.n
    }

    pub fn pair(&self) -> Result<KindPair> {
        self.problem.parse()
    }

    pub fn instance(&self) -> Result<ProblemInstance> {
        let pair = self.pair()?;
        make_problem(pair.0, pair.1, self.n, self.instance)
    }

    pub fn tpb_config(&self) -> TpbConfig {
        TpbConfig {
            k: self.k,
            degree: self.degree,
            r_1st: self.r_1st,
            budget: self.budget(),
            optimizer: self.optimizer,
            seed: self.seed,
        }
    }

    /// First 16 hex digits of the SHA-256 of the spec's JSON form.
    pub fn key(&self) -> String {
        let json = serde_json::to_string(self).expect("specs serialize");
        hex::encode(&Sha256::digest(json.as_bytes())[..8])
    }
}

/// What gets stored next to a run's ledger and trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub key: String,
    pub spec: RunSpec,
    pub ref_hv: f64,
    pub evaluations: usize,
    pub final_indicator: f64,
    pub meta: RunMeta,
}

/// The full grid in a fixed order.
pub fn expand_grid(cfg: &ExperimentConfig) -> Vec<RunSpec> {
    let mut specs = Vec::new();
    for pair in &cfg.problems {
        for &n in &cfg.dims {
            for &budget_factor in &cfg.budget_factors {
                for &algorithm in &cfg.algorithms {
                    for &k in &cfg.k_values {
                        for &degree in &cfg.d_values {
                            for &r_1st in &cfg.r1st_values {
                                for instance in 1..=cfg.instances {
                                    for seed in 1..=cfg.seeds {
                                        specs.push(RunSpec {
                                            problem: pair.to_string(),
                                            n,
                                            budget_factor,
                                            algorithm,
                                            k,
                                            degree,
                                            r_1st,
                                            instance,
                                            seed,
                                            optimizer: cfg.optimizer,
                                            resolution: cfg.resolution,
                                        });
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    specs
}

pub fn runs_dir(out_dir: &Path) -> PathBuf {
    out_dir.join("runs")
}

pub fn reference_dir(out_dir: &Path) -> PathBuf {
    out_dir.join("reference")
}

pub(crate) fn run_path(out_dir: &Path, key: &str, suffix: &str) -> PathBuf {
    runs_dir(out_dir).join(format!("{key}.{suffix}"))
}

static TEMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// Writes to a temporary sibling, then renames over `path`.
pub(crate) fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(
        ".{name}.{}.{}.tmp",
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Loads a completed run, if its metadata file exists and parses.
pub fn load_record(out_dir: &Path, key: &str) -> Option<RunRecord> {
    let text = fs::read_to_string(run_path(out_dir, key, "meta.json")).ok()?;
    serde_json::from_str(&text).ok()
}

/// Runs one spec and persists ledger, trace, then metadata.
pub fn execute_run(spec: &RunSpec, refdata: &ReferenceData, out_dir: &Path) -> Result<RunRecord> {
    let key = spec.key();
    let problem = spec.instance()?;
    let run = run_algorithm(spec.algorithm, &problem, &spec.tpb_config())?;
    let trace = IndicatorTrace::from_objectives(run.ledger.objectives(), refdata)?;
    write_atomic(&run_path(out_dir, &key, "ledger.jsonl"), &run.ledger.to_jsonl())?;
    write_atomic(&run_path(out_dir, &key, "trace.csv"), &trace.to_csv())?;
    let record = RunRecord {
        key: key.clone(),
        spec: spec.clone(),
        ref_hv: refdata.ref_hv,
        evaluations: run.ledger.len(),
        final_indicator: trace.final_value(),
        meta: run.meta,
    };
    write_atomic(
        &run_path(out_dir, &key, "meta.json"),
        &serde_json::to_string_pretty(&record)?,
    )?;
    Ok(record)
}

/// Outcome of one grid cell.
#[derive(Debug, Clone)]
pub enum RunStatus {
    Done(RunRecord),
    Failed { spec: RunSpec, message: String },
}

fn panic_message(payload: Box<dyn std::any::Any + Send>) -> String {
    payload
        .downcast_ref::<&str>()
        .map(|s| s.to_string())
        .or_else(|| payload.downcast_ref::<String>().cloned())
        .unwrap_or_else(|| "panic".into())
}

/// Executes every missing run of the grid and writes `summary.csv`.
pub fn execute_grid(cfg: &ExperimentConfig) -> Result<Vec<RunStatus>> {
    let out = cfg.out_dir.as_path();
    fs::create_dir_all(runs_dir(out))?;
    let specs = expand_grid(cfg);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build()
        .map_err(|e| Error::config("workers", e.to_string()))?;
    let cache = ReferenceCache::new(reference_dir(out), cfg.resolution);

    let todo: Vec<&RunSpec> = specs
        .iter()
        .filter(|s| load_record(out, &s.key()).is_none())
        .collect();
    log::info!("{} runs in grid, {} to execute", specs.len(), todo.len());

    let instances: BTreeSet<(String, usize, u64)> = todo
        .iter()
        .map(|s| (s.problem.clone(), s.n, s.instance))
        .collect();
    pool.install(|| {
        instances.par_iter().for_each(|(problem, n, instance)| {
            let built = problem
                .parse::<KindPair>()
                .and_then(|p| make_problem(p.0, p.1, *n, *instance));
            match built.and_then(|p| cache.get(&p)) {
                Ok(_) => log::debug!("reference front ready for {problem} n={n} i={instance}"),
                Err(e) => log::error!("reference front for {problem} n={n} i={instance}: {e}"),
            }
        })
    });

    let fresh: Vec<(usize, RunStatus)> = pool.install(|| {
        todo.par_iter()
            .map(|spec| {
                let attempt = catch_unwind(AssertUnwindSafe(|| {
                    let problem = spec.instance()?;
                    let refdata = cache.get(&problem)?;
                    execute_run(spec, &refdata, out)
                }));
                let idx = specs.iter().position(|s| s == *spec).expect("spec from grid");
                let status = match attempt {
                    Ok(Ok(record)) => RunStatus::Done(record),
                    Ok(Err(e)) => RunStatus::Failed {
                        spec: (*spec).clone(),
                        message: e.to_string(),
                    },
                    Err(payload) => RunStatus::Failed {
                        spec: (*spec).clone(),
                        message: panic_message(payload),
                    },
                };
                if let RunStatus::Failed { spec, message } = &status {
                    log::error!("run {} ({} {} n={}) failed: {message}", spec.key(), spec.algorithm, spec.problem, spec.n);
                }
                (idx, status)
            })
            .collect()
    });

    let mut statuses: Vec<Option<RunStatus>> = vec![None; specs.len()];
    for (idx, status) in fresh {
        statuses[idx] = Some(status);
    }
    let statuses: Vec<RunStatus> = statuses
        .into_iter()
        .zip(&specs)
        .map(|(s, spec)| {
            s.unwrap_or_else(|| match load_record(out, &spec.key()) {
                Some(r) => RunStatus::Done(r),
                None => RunStatus::Failed {
                    spec: spec.clone(),
                    message: "record vanished".into(),
                },
            })
        })
        .collect();
    write_atomic(&out.join("summary.csv"), &summary_csv(&statuses))?;
    Ok(statuses)
}

fn summary_csv(statuses: &[RunStatus]) -> String {
    let mut s = String::from(
        "key,problem,label,n,budget_factor,budget,algorithm,K,D,r1st,instance,seed,status,evaluations,final_indicator,overhead_seconds\n",
    );
    for status in statuses {
        let (spec, tail) = match status {
            RunStatus::Done(r) => (
                &r.spec,
                format!("ok,{},{},{}", r.evaluations, r.final_indicator, r.meta.overhead_seconds()),
            ),
            RunStatus::Failed { spec, .. } => (spec, "failed,,,".to_string()),
        };
        let label = spec.pair().map_or("unknown", |p| p.label());
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            spec.key(),
            spec.problem,
            label,
            spec.n,
            spec.budget_factor,
            spec.budget(),
            spec.algorithm,
            spec.k,
            spec.degree,
            spec.r_1st,
            spec.instance,
            spec.seed,
            tail
        );
    }
    s
}

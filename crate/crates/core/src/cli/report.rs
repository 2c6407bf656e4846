use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::{run_path, runs_dir, write_atomic, RunRecord};
use crate::assess::{ecdf, ecdf_csv, IndicatorTrace};
use crate::tpb::Algorithm;
use crate::{Error, Result};

/// Every run record under `out_dir`, sorted by spec.
pub fn load_all_records(out_dir: &Path) -> Result<Vec<RunRecord>> {
    let mut records = Vec::new();
    let dir = runs_dir(out_dir);
    if !dir.exists() {
        return Ok(records);
    }
    for entry in fs::read_dir(&dir)? {
        let path = entry?.path();
        let is_meta = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(".meta.json") && !n.starts_with('.'));
        if is_meta {
            let text = fs::read_to_string(&path)?;
            let record: RunRecord = serde_json::from_str(&text).map_err(|e| Error::Format {
                path: path.clone(),
                message: e.to_string(),
            })?;
            records.push(record);
        }
    }
    records.sort_by(|a, b| sort_key(a).partial_cmp(&sort_key(b)).expect("finite r1st"));
    Ok(records)
}

type SortKey = (String, usize, usize, usize, u32, f64, u64, u64, Algorithm);

fn sort_key(r: &RunRecord) -> SortKey {
    let s = &r.spec;
    (s.problem.clone(), s.n, s.budget_factor, s.k, s.degree, s.r_1st, s.instance, s.seed, s.algorithm)
}

/// Paths written by `emit_reports`.
#[derive(Debug, Clone, Default)]
pub struct ReportFiles {
    pub ecdf: Vec<PathBuf>,
    pub walltime: PathBuf,
    pub final_indicator: PathBuf,
}

/// Writes ECDF curves per (algorithm, N, budget factor, K, D, r1st), a
/// wall-time table and a paired final-indicator table.
pub fn emit_reports(out_dir: &Path) -> Result<ReportFiles> {
    let records = load_all_records(out_dir)?;
    if records.is_empty() {
        return Err(Error::precondition(format!(
            "no completed runs under {}",
            out_dir.display()
        )));
    }
    let reports = out_dir.join("reports");
    let mut files = ReportFiles::default();

    let mut groups: BTreeMap<String, (usize, usize, Vec<IndicatorTrace>)> = BTreeMap::new();
    for r in &records {
        let s = &r.spec;
        let name = format!(
            "ecdf_{}_n{}_bf{}_K{}_D{}_r{}.csv",
            s.algorithm, s.n, s.budget_factor, s.k, s.degree, s.r_1st
        );
        let text = fs::read_to_string(run_path(out_dir, &r.key, "trace.csv"))?;
        let trace = IndicatorTrace::from_csv(&text, r.ref_hv)?;
        let entry = groups.entry(name).or_insert((s.n, s.budget(), Vec::new()));
        entry.2.push(trace);
    }
    for (name, (n, budget, traces)) in &groups {
        let grid: Vec<usize> = (1..=*budget).collect();
        let curve = ecdf(traces, &grid)?;
        let path = reports.join(name);
        write_atomic(&path, &ecdf_csv(&curve, *n))?;
        files.ecdf.push(path);
    }

    let mut wall: BTreeMap<(Algorithm, usize), Vec<(f64, f64)>> = BTreeMap::new();
    for r in &records {
        wall.entry((r.spec.algorithm, r.spec.n))
            .or_default()
            .push((r.meta.overhead_seconds(), r.meta.eval_seconds));
    }
    let mut s = String::from("algorithm,n,runs,mean_overhead_seconds,max_overhead_seconds,mean_eval_seconds\n");
    for ((alg, n), rows) in &wall {
        let count = rows.len() as f64;
        let mean = rows.iter().map(|r| r.0).sum::<f64>() / count;
        let max = rows.iter().map(|r| r.0).fold(0.0, f64::max);
        let eval = rows.iter().map(|r| r.1).sum::<f64>() / count;
        let _ = writeln!(s, "{alg},{n},{},{mean},{max},{eval}", rows.len());
    }
    files.walltime = reports.join("walltime.csv");
    write_atomic(&files.walltime, &s)?;

    let algorithms: Vec<Algorithm> = {
        let mut a: Vec<Algorithm> = records.iter().map(|r| r.spec.algorithm).collect();
        a.sort();
        a.dedup();
        a
    };
    type PairKey = (String, usize, usize, usize, u32, String, u64, u64);
    let mut paired: BTreeMap<PairKey, BTreeMap<Algorithm, f64>> = BTreeMap::new();
    for r in &records {
        let sp = &r.spec;
        let key = (
            sp.problem.clone(),
            sp.n,
            sp.budget_factor,
            sp.k,
            sp.degree,
            sp.r_1st.to_string(),
            sp.instance,
            sp.seed,
        );
        paired.entry(key).or_default().insert(sp.algorithm, r.final_indicator);
    }
    let mut s = String::from("problem,n,budget_factor,K,D,r1st,instance,seed");
    for a in &algorithms {
        let _ = write!(s, ",{a}");
    }
    s.push('\n');
    for ((problem, n, bf, k, d, r, inst, seed), values) in &paired {
        let _ = write!(s, "{problem},{n},{bf},{k},{d},{r},{inst},{seed}");
        for a in &algorithms {
            match values.get(a) {
                Some(v) => {
                    let _ = write!(s, ",{v}");
                }
                None => s.push(','),
            }
        }
        s.push('\n');
    }
    files.final_indicator = reports.join("final_indicator.csv");
    write_atomic(&files.final_indicator, &s)?;
    Ok(files)
}

//! Driving the experiment runner from code instead of the `tpb-bench`
//! binary: a small grid, written to a directory, then the reports.
//!
//! ```sh
//! cargo run --release --example experiment_grid -- /tmp/tpb-grid
//! ```

use std::path::PathBuf;

use tpb::cli::{emit_reports, execute_grid, ExperimentConfig, RunStatus};
use tpb::tpb::Algorithm;

pub fn run_example(out_dir: PathBuf) -> tpb::Result<()> {
    let cfg = ExperimentConfig {
        problems: vec!["sphere/sphere".parse()?, "sphere/rosenbrock".parse()?],
        dims: vec![2, 5],
        budget_factors: vec![20],
        algorithms: vec![Algorithm::Tpb, Algorithm::Tpb1],
        instances: 2,
        out_dir,
        ..ExperimentConfig::default()
    };
    let statuses = execute_grid(&cfg)?;
    let failed = statuses.iter().filter(|s| matches!(s, RunStatus::Failed { .. })).count();
    println!("{} runs, {failed} failed", statuses.len());

    let files = emit_reports(&cfg.out_dir)?;
    for path in &files.ecdf {
        println!("ecdf: {}", path.display());
    }
    print!("{}", std::fs::read_to_string(&files.final_indicator)?);
    Ok(())
}

fn main() -> tpb::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "tpb-grid".into());
    run_example(PathBuf::from(out))
}

//! Runtime ECDFs: fraction of (run, target) pairs solved against
//! evaluations per variable, for TPB and TPB2 on the unimodal suite pairs.

use tpb::assess::{ecdf, ecdf_csv, IndicatorTrace};
use tpb::problems::{make_problem, reference_front, standard_suite};
use tpb::tpb::{run_algorithm, Algorithm, TpbConfig};

pub fn run_example(n: usize, instances: u64) -> tpb::Result<()> {
    let budget = 20 * n;
    let grid: Vec<usize> = (1..=budget).collect();
    for alg in [Algorithm::Tpb, Algorithm::Tpb2] {
        let mut traces = Vec::new();
        for pair in standard_suite().into_iter().filter(|p| !p.is_multimodal()) {
            for instance in 1..=instances {
                let p = make_problem(pair.0, pair.1, n, instance)?;
                let refdata = reference_front(&p, 100)?;
                let run = run_algorithm(alg, &p, &TpbConfig::for_budget(budget))?;
                traces.push(IndicatorTrace::from_objectives(run.ledger.objectives(), &refdata)?);
            }
        }
        let curve = ecdf(&traces, &grid)?;
        println!("{alg} ({} runs, N = {n}):", traces.len());
        for (e, frac) in curve.iter().filter(|(e, _)| e % (2 * n) == 0) {
            let bar = "#".repeat((frac * 50.0).round() as usize);
            println!("  {:>5.1} {frac:.3} {bar}", *e as f64 / n as f64);
        }
        let csv = ecdf_csv(&curve, n);
        println!("  csv: {} rows", csv.lines().count() - 1);
    }
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example(5, 3)
}

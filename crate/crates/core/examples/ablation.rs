//! TPB against its two ablations on a few suite problems: TPB1 stops after
//! phase one, TPB2 replaces phase one with a Latin hypercube of `11N − 1`
//! points.
//!
//! ```sh
//! cargo run --release --example ablation -- 10
//! ```

use tpb::assess::indicator_of;
use tpb::problems::{make_problem, reference_front, FunctionKind::*};
use tpb::tpb::{run_algorithm, Algorithm, TpbConfig};

pub fn run_example(n: usize, instances: u64) -> tpb::Result<()> {
    let pairs = [(Sphere, Sphere), (Sphere, Ellipsoid), (Rosenbrock, Rosenbrock), (Sphere, Rastrigin)];
    println!("N = {n}, budget = {}, mean final indicator over {instances} instances", 20 * n);
    println!("{:<24}{:>10}{:>10}{:>10}", "problem", "tpb", "tpb1", "tpb2");
    for (f1, f2) in pairs {
        let mut totals = [0.0; 3];
        for instance in 1..=instances {
            let problem = make_problem(f1, f2, n, instance)?;
            let refdata = reference_front(&problem, 100)?;
            let cfg = TpbConfig {
                seed: instance,
                ..TpbConfig::for_budget(20 * n)
            };
            for (slot, alg) in totals.iter_mut().zip(Algorithm::ALL) {
                let run = run_algorithm(alg, &problem, &cfg)?;
                *slot += indicator_of(run.ledger.objectives(), &refdata)? / instances as f64;
            }
        }
        println!(
            "{:<24}{:>10.4}{:>10.4}{:>10.4}",
            format!("{f1}/{f2}"),
            totals[0],
            totals[1],
            totals[2]
        );
    }
    Ok(())
}

fn main() -> tpb::Result<()> {
    let n = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    run_example(n, 5)
}

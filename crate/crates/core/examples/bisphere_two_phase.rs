//! Both phases on a two-variable bi-sphere problem with a 40-evaluation
//! budget: three weighted-sum solutions, a quadratic Bézier curve through
//! them, and four points sampled from the curve.
//!
//! ```sh
//! cargo run --release --example bisphere_two_phase
//! ```

use tpb::assess::Archive;
use tpb::problems::{make_problem, FunctionKind};
use tpb::tpb::{run_tpb, TpbConfig};

pub fn run_example() -> tpb::Result<()> {
    let problem = make_problem(FunctionKind::Sphere, FunctionKind::Sphere, 2, 1)?;
    let cfg = TpbConfig::for_budget(40);
    let run = run_tpb(&problem, &cfg)?;
    let meta = &run.meta;

    println!("optima: {:?} and {:?}", problem.shift(0), problem.shift(1));
    println!(
        "phase one used {} evaluations, phase two {}",
        meta.budget_1st, meta.budget_2nd
    );
    for (k, x) in meta.b_star.iter().enumerate() {
        println!("  B*[{k}] = {x:.4?}");
    }
    println!("interpolated points (t -> x):");
    for e in &run.ledger.entries()[meta.budget_1st..] {
        println!("  #{:>2} x = {:.4?}  f = {:.4?}", e.eval_index, e.x, e.f);
    }
    if let Some(model) = &meta.model {
        print!("fitted model:\n{model}");
    }

    let mut archive = Archive::new();
    for e in run.ledger.entries() {
        archive.insert(e.x.clone(), e.f.clone());
    }
    println!("{} nondominated points out of {}", archive.len(), run.ledger.len());
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example()
}

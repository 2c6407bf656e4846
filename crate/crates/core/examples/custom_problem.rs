//! Plugging a user-defined problem into TPB through `MultiObjectiveProblem`.
//!
//! The problem is a convex bi-objective test function on `[0, 1]^N` whose
//! Pareto set is `x_2 = ... = x_N = 0`.

use tpb::assess::Archive;
use tpb::dfo::Bounds;
use tpb::problems::MultiObjectiveProblem;
use tpb::tpb::{run_tpb, TpbConfig};
use tpb::ObjectiveVector;

struct ConvexFront {
    bounds: Bounds,
}

impl MultiObjectiveProblem for ConvexFront {
    fn n_vars(&self) -> usize {
        self.bounds.dim()
    }

    fn n_objectives(&self) -> usize {
        2
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> ObjectiveVector {
        let g = 1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64;
        let f1 = x[0];
        vec![f1, g * (1.0 - (f1 / g).sqrt())]
    }
}

pub fn run_example() -> tpb::Result<()> {
    let problem = ConvexFront {
        bounds: Bounds::uniform(4, 0.0, 1.0)?,
    };
    let run = run_tpb(&problem, &TpbConfig::for_budget(120))?;
    let mut archive = Archive::new();
    for e in run.ledger.entries() {
        archive.insert(e.x.clone(), e.f.clone());
    }
    let mut front: Vec<_> = archive.objectives().cloned().collect();
    front.sort_by(|a, b| a[0].total_cmp(&b[0]));
    println!("{} nondominated points:", front.len());
    for f in front.iter().step_by((front.len() / 10).max(1)) {
        let ideal = 1.0 - f[0].sqrt();
        println!("  f1 {:.3}  f2 {:.3}  (front value {:.3})", f[0], f[1], ideal);
    }
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example()
}

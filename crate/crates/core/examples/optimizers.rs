//! The two bounded derivative-free optimizers on scalar test functions.

use tpb::dfo::{
    nelder_mead_optimize, optimize, tr_quadratic_optimize, Bounds, OptimizerKind, ScalarProblem,
};

fn rosenbrock(x: &[f64]) -> f64 {
    x.windows(2)
        .map(|w| 100.0 * (w[0] * w[0] - w[1]).powi(2) + (w[0] - 1.0).powi(2))
        .sum()
}

pub fn run_example() -> tpb::Result<()> {
    let bounds = Bounds::uniform(4, -5.0, 5.0)?;
    for kind in [OptimizerKind::TrustRegion, OptimizerKind::NelderMead] {
        let mut problem = ScalarProblem::new(rosenbrock, bounds.clone(), 1000)?;
        let trace = optimize(kind, &mut problem, &[0.0; 4])?;
        println!(
            "{kind:<13} rosenbrock-4: best {:.3e} after {} evaluations (stopped early: {})",
            trace.best_value,
            trace.len(),
            trace.terminated_early
        );
    }

    // A linear objective drives the trust region into a corner of the box.
    let mut linear = ScalarProblem::new(|x: &[f64]| x[0] - 2.0 * x[1], Bounds::uniform(2, -1.0, 1.0)?, 60)?;
    let trace = tr_quadratic_optimize(&mut linear, &[0.0, 0.0], 0.2, 1e-6)?;
    println!("linear: best x = {:?}", trace.best_x);

    // Evaluations are counted against the cap, including the start point.
    let mut calls = 0;
    let mut capped = ScalarProblem::new(
        |x: &[f64]| {
            calls += 1;
            x.iter().map(|v| v.abs()).sum()
        },
        Bounds::uniform(3, -5.0, 5.0)?,
        25,
    )?;
    let trace = nelder_mead_optimize(&mut capped, &[3.0, -2.0, 1.0])?;
    println!("nelder-mead on |x|_1: {} evaluations, best {:.3}", trace.len(), trace.best_value);
    drop(capped);
    assert_eq!(calls, trace.len());
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example()
}

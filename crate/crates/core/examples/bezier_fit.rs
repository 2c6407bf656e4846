//! Fitting, evaluating and serializing Bézier simplices.
//!
//! A degree-3 curve is sampled, refit from the samples, and written out in
//! the crate's text format. A three-objective surface (a triangle patch)
//! shows the `M > 2` case.

use tpb::bezier::{
    bernstein_basis, enumerate_multi_indices, fit_ols, simplex_grid, BezierSimplex, SimplexParam,
};

pub fn run_example() -> tpb::Result<()> {
    // Curve in R^2 with four control points.
    let curve = BezierSimplex::new(
        2,
        3,
        vec![vec![0.0, 3.0], vec![1.0, 3.0], vec![2.0, 1.0], vec![3.0, 0.0]],
    )?;
    for d in curve.indices() {
        println!("control point {:?} -> {:?}", d.0, curve.control_point(d).unwrap());
    }

    let samples: Vec<(SimplexParam, Vec<f64>)> = simplex_grid(2, 8, false)?
        .into_iter()
        .map(|t| {
            let x = curve.evaluate(&t).unwrap();
            (t, x)
        })
        .collect();
    let fit = fit_ols(&samples, 2, 3, 2)?;
    println!(
        "refit from {} samples: rank {}, loss {:.2e}",
        samples.len(),
        fit.rank,
        fit.model.ols_loss(&samples)?
    );

    let text = fit.model.to_text();
    let back = BezierSimplex::from_text(&text)?;
    assert_eq!(back, fit.model);
    print!("{text}");

    // Too few samples for the degree: the minimum-norm solution is used.
    let sparse = fit_ols(&samples[..2], 2, 3, 2)?;
    println!("2 samples for 4 control points: rank deficient = {}", sparse.rank_deficient);

    // A quadratic triangle patch in R^3.
    let indices = enumerate_multi_indices(3, 2)?;
    let patch = BezierSimplex::new(
        3,
        2,
        indices
            .iter()
            .map(|d| vec![d.0[0] as f64, d.0[1] as f64, (d.0[2] * d.0[2]) as f64])
            .collect(),
    )?;
    let centroid = SimplexParam::new(vec![1.0 / 3.0; 3])?;
    println!("basis at centroid: {:.4?}", bernstein_basis(2, &centroid)?);
    println!("patch at centroid: {:.4?}", patch.evaluate(&centroid)?);
    Ok(())
}

fn main() -> tpb::Result<()> {
    run_example()
}

use super::{prepare_start, EvaluationTrace, Evaluator, ScalarProblem};
use crate::Result;

const REFLECT: f64 = 1.0;
const EXPAND: f64 = 2.0;
const CONTRACT: f64 = 0.5;
const SHRINK: f64 = 0.5;

/// Nelder–Mead simplex search with candidates clipped into the box.
///
/// The initial simplex steps 10% of each coordinate's width from `x_init`,
/// flipping direction at a bound. Stops early once the simplex diameter falls
/// below `1e-8` times the largest box width.
pub fn nelder_mead_optimize<F: FnMut(&[f64]) -> f64>(
    problem: &mut ScalarProblem<F>,
    x_init: &[f64],
) -> Result<EvaluationTrace> {
    let x0 = prepare_start(&problem.bounds, x_init)?;
    let n = x0.len();
    let mut ev = Evaluator::new(problem);
    let bounds = ev.bounds().clone();
    let tol = 1e-8 * bounds.max_width();

    let Some(f0) = ev.eval(&x0) else {
        unreachable!("budget is at least one")
    };
    let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), f0)];
    for i in 0..n {
        let width = bounds.upper()[i] - bounds.lower()[i];
        let step = 0.1 * width;
        let mut v = x0.clone();
        v[i] = if x0[i] + step <= bounds.upper()[i] {
            x0[i] + step
        } else {
            x0[i] - step
        };
        match ev.eval(&v) {
            Some(fv) => simplex.push((v, fv)),
            None => return Ok(ev.finish(false)),
        }
    }

    let clipped = |mut x: Vec<f64>| {
        bounds.clip(&mut x);
        x
    };
    let along = |from: &[f64], to: &[f64], coef: f64| -> Vec<f64> {
        from.iter().zip(to).map(|(c, w)| c + coef * (c - w)).collect()
    };

    loop {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(v, _)| v.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < tol {
            return Ok(ev.finish(true));
        }

        let worst = simplex[n].clone();
        let second_worst = simplex[n - 1].1;
        let best = simplex[0].1;
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }

        let xr = clipped(along(&centroid, &worst.0, REFLECT));
        let Some(fr) = ev.eval(&xr) else { break };
        if fr < best {
            let xe = clipped(along(&centroid, &worst.0, EXPAND));
            let Some(fe) = ev.eval(&xe) else { break };
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
            continue;
        }
        if fr < second_worst {
            simplex[n] = (xr, fr);
            continue;
        }
        let (xc, fc) = if fr < worst.1 {
            let xc = clipped(along(&centroid, &xr, -CONTRACT));
            let Some(fc) = ev.eval(&xc) else { break };
            (xc, fc)
        } else {
            let xc = clipped(along(&centroid, &worst.0, -CONTRACT));
            let Some(fc) = ev.eval(&xc) else { break };
            (xc, fc)
        };
        if fc < worst.1.min(fr) {
            simplex[n] = (xc, fc);
            continue;
        }
        let anchor = simplex[0].0.clone();
        for vertex in simplex.iter_mut().skip(1) {
            let v: Vec<f64> = anchor
                .iter()
                .zip(&vertex.0)
                .map(|(a, x)| a + SHRINK * (x - a))
                .collect();
            let Some(fv) = ev.eval(&v) else {
                return Ok(ev.finish(false));
            };
            *vertex = (v, fv);
        }
    }
    Ok(ev.finish(false))
}

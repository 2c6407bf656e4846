//! Model-based trust-region search for box-constrained problems.
//!
//! A quadratic model interpolates the objective on `2N + 1` points. The
//! initial set is the stencil `x0, x0 ± δ e_i`, which fixes the gradient and a
//! diagonal Hessian. Whenever a point in the set is replaced, the model is
//! re-fitted with the least change in Hessian (Frobenius norm) that restores
//! interpolation, so curvature information accumulates off the diagonal over
//! time. The point to drop is the one whose Lagrange function is largest at
//! the newcomer, weighted by distance, which keeps the interpolation system
//! well posed.
//!
//! The trust region is an ∞-norm box, so the step subproblem is a box QP over
//! the intersection with the bounds; it is solved by exact cyclic coordinate
//! minimization.

use nalgebra::{DMatrix, DVector, Dyn, LU};

use super::{prepare_start, Bounds, EvaluationTrace, Evaluator, ScalarProblem};
use crate::{Error, Result};

type Lu = LU<f64, Dyn, Dyn>;

const ACCEPT_RATIO: f64 = 0.1;
const EXPAND_RATIO: f64 = 0.7;
const EXPAND: f64 = 2.0;
const SHRINK: f64 = 0.5;
/// A step shorter than this fraction of the radius counts as "no progress".
const SHORT_STEP: f64 = 0.1;
/// Points further than this many radii from the incumbent trigger a geometry step.
const FAR_POINT: f64 = 2.0;
const SUBPROBLEM_SWEEPS: usize = 100;

/// Initial and final trust-region radii.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrustRegionSettings {
    pub rho_begin: f64,
    pub rho_end: f64,
}

impl TrustRegionSettings {
    /// `rho_begin = 0.1 · min width`, `rho_end = 1e-8`.
    pub fn for_bounds(bounds: &Bounds) -> Self {
        TrustRegionSettings {
            rho_begin: 0.1 * bounds.min_width(),
            rho_end: 1e-8,
        }
    }
}

/// `q(y) = c + gᵀ(y − base) + ½ (y − base)ᵀ H (y − base)`.
#[derive(Debug, Clone)]
struct Quadratic {
    base: Vec<f64>,
    c: f64,
    g: DVector<f64>,
    h: DMatrix<f64>,
}

impl Quadratic {
    fn zero(base: &[f64]) -> Self {
        let n = base.len();
        Quadratic {
            base: base.to_vec(),
            c: 0.0,
            g: DVector::zeros(n),
            h: DMatrix::zeros(n, n),
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        let s = DVector::from_iterator(y.len(), y.iter().zip(&self.base).map(|(a, b)| a - b));
        self.c + self.g.dot(&s) + 0.5 * s.dot(&(&self.h * &s))
    }

    /// Re-expresses the model around `base`.
    fn rebase(&mut self, base: &[f64]) {
        let shift = DVector::from_iterator(base.len(), base.iter().zip(&self.base).map(|(a, b)| a - b));
        let hs = &self.h * &shift;
        self.c += self.g.dot(&shift) + 0.5 * shift.dot(&hs);
        self.g += hs;
        self.base = base.to_vec();
    }

    /// Approximate minimizer of the model over `base + [lo, hi]` and the
    /// predicted reduction.
    fn minimize_in_box(&self, lo: &[f64], hi: &[f64]) -> (Vec<f64>, f64) {
        let n = lo.len();
        let mut s = vec![0.0; n];
        let mut hs = vec![0.0; n];
        let scale = lo
            .iter()
            .zip(hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max);
        for _ in 0..SUBPROBLEM_SWEEPS {
            let mut moved: f64 = 0.0;
            for i in 0..n {
                let hii = self.h[(i, i)];
                let linear = self.g[i] + hs[i] - hii * s[i];
                let q = |t: f64| linear * t + 0.5 * hii * t * t;
                let mut best = s[i];
                let mut best_q = q(s[i]);
                let mut consider = |t: f64| {
                    let v = q(t);
                    if v < best_q {
                        best = t;
                        best_q = v;
                    }
                };
                consider(lo[i]);
                consider(hi[i]);
                if hii > 0.0 {
                    consider((-linear / hii).clamp(lo[i], hi[i]));
                }
                let delta = best - s[i];
                if delta != 0.0 {
                    for k in 0..n {
                        hs[k] += self.h[(k, i)] * delta;
                    }
                    s[i] = best;
                    moved = moved.max(delta.abs());
                }
            }
            if moved <= 1e-12 * scale {
                break;
            }
        }
        let sv = DVector::from_vec(s.clone());
        let change = self.g.dot(&sv) + 0.5 * sv.dot(&(&self.h * &sv));
        (s, -change)
    }
}

struct InterpolationSet {
    points: Vec<Vec<f64>>,
    values: Vec<f64>,
    centre: usize,
}

impl InterpolationSet {
    fn centre_point(&self) -> &[f64] {
        &self.points[self.centre]
    }

    fn inf_dist(&self, idx: usize) -> f64 {
        self.points[idx]
            .iter()
            .zip(self.centre_point())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    fn farthest(&self) -> Option<usize> {
        (0..self.points.len())
            .filter(|&j| j != self.centre)
            .max_by(|&a, &b| self.inf_dist(a).total_cmp(&self.inf_dist(b)))
    }

    fn scaled(&self, y: &[f64], delta: f64) -> Vec<f64> {
        y.iter()
            .zip(self.centre_point())
            .map(|(a, c)| (a - c) / delta)
            .collect()
    }

    /// Right-hand side `w(y) = [½ (u_j · u)²]_j ; 1 ; u` of the KKT system,
    /// in coordinates scaled by the radius around the centre.
    fn kkt_vector(&self, y: &[f64], delta: f64) -> DVector<f64> {
        let m = self.points.len();
        let n = y.len();
        let u = self.scaled(y, delta);
        let mut w = DVector::zeros(m + n + 1);
        for (j, p) in self.points.iter().enumerate() {
            let uj = self.scaled(p, delta);
            let dot: f64 = uj.iter().zip(&u).map(|(a, b)| a * b).sum();
            w[j] = 0.5 * dot * dot;
        }
        w[m] = 1.0;
        for i in 0..n {
            w[m + 1 + i] = u[i];
        }
        w
    }

    /// Factorized least-change KKT matrix `[[A, Xᵀ], [X, 0]]`, or `None` when
    /// the set is degenerate.
    fn kkt(&self, delta: f64) -> Option<Lu> {
        let m = self.points.len();
        let n = self.centre_point().len();
        let dim = m + n + 1;
        let us: Vec<Vec<f64>> = self.points.iter().map(|p| self.scaled(p, delta)).collect();
        let mut w = DMatrix::zeros(dim, dim);
        for i in 0..m {
            for j in 0..m {
                let dot: f64 = us[i].iter().zip(&us[j]).map(|(a, b)| a * b).sum();
                w[(i, j)] = 0.5 * dot * dot;
            }
            w[(i, m)] = 1.0;
            w[(m, i)] = 1.0;
            for k in 0..n {
                w[(i, m + 1 + k)] = us[i][k];
                w[(m + 1 + k, i)] = us[i][k];
            }
        }
        let lu = w.lu();
        let u = lu.u();
        let diag = (0..dim).map(|i| u[(i, i)].abs());
        let (lo, hi) = diag.fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(v), hi.max(v)));
        if lo > 1e-13 * hi && hi.is_finite() {
            Some(lu)
        } else {
            None
        }
    }

    /// Lagrange function values of every set member at `y`.
    fn lagrange(&self, kkt: &Lu, y: &[f64], delta: f64) -> Option<Vec<f64>> {
        let m = self.points.len();
        let sol = kkt.solve(&self.kkt_vector(y, delta))?;
        Some(sol.iter().take(m).copied().collect())
    }

    /// Adjusts `model` with the least Hessian change that makes it
    /// interpolate every point in the set. Returns `false` on degeneracy.
    fn refit(&self, model: &mut Quadratic, delta: f64) -> bool {
        let Some(kkt) = self.kkt(delta) else {
            return false;
        };
        let m = self.points.len();
        let n = self.centre_point().len();
        model.rebase(self.centre_point());
        let mut rhs = DVector::zeros(m + n + 1);
        for (j, (p, v)) in self.points.iter().zip(&self.values).enumerate() {
            rhs[j] = v - model.value(p);
        }
        let Some(sol) = kkt.solve(&rhs) else {
            return false;
        };
        if sol.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let mut dh = DMatrix::zeros(n, n);
        for (j, p) in self.points.iter().enumerate() {
            let u = DVector::from_vec(self.scaled(p, delta));
            dh += sol[j] * &u * u.transpose();
        }
        model.h += dh / (delta * delta);
        model.c += sol[m];
        for i in 0..n {
            model.g[i] += sol[m + 1 + i] / delta;
        }
        true
    }

    /// Member to replace with `y`: largest `|ℓ_j(y)| · max(1, (d_j/Δ)²)`,
    /// never the centre.
    fn replacement_index(&self, y: &[f64], delta: f64) -> Option<usize> {
        let kkt = self.kkt(delta)?;
        let lambda = self.lagrange(&kkt, y, delta)?;
        lambda
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != self.centre)
            .map(|(j, l)| (j, l.abs() * (self.inf_dist(j) / delta).powi(2).max(1.0)))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(j, _)| j)
    }

    /// Among `centre ± Δ e_i` (kept inside the box), the point maximizing the
    /// Lagrange function of the member being replaced.
    fn geometry_point(&self, bounds: &Bounds, replaced: usize, delta: f64) -> Option<Vec<f64>> {
        let kkt = self.kkt(delta)?;
        let xc = self.centre_point();
        let mut best: Option<(Vec<f64>, f64)> = None;
        for i in 0..xc.len() {
            for dir in [1.0, -1.0] {
                let room = if dir > 0.0 {
                    bounds.upper()[i] - xc[i]
                } else {
                    xc[i] - bounds.lower()[i]
                };
                let off = room.min(delta);
                if off <= 1e-3 * delta {
                    continue;
                }
                let mut y = xc.to_vec();
                y[i] += dir * off;
                let score = self.lagrange(&kkt, &y, delta)?[replaced].abs();
                if best.as_ref().is_none_or(|(_, s)| score > *s) {
                    best = Some((y, score));
                }
            }
        }
        best.filter(|(_, s)| *s > 1e-8).map(|(y, _)| y)
    }

    fn replace(&mut self, slot: usize, y: Vec<f64>, value: f64) {
        self.points[slot] = y;
        self.values[slot] = value;
    }
}

/// Builds `x0, x0 + a_i e_i, x0 + b_i e_i` with two distinct feasible offsets
/// per axis of magnitude about `delta`.
fn stencil(x0: &[f64], bounds: &Bounds, delta: f64) -> Vec<Vec<f64>> {
    let mut pts = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let up = (bounds.upper()[i] - x0[i]).min(delta);
        let down = (x0[i] - bounds.lower()[i]).min(delta);
        let tiny = 1e-3 * delta;
        let (a, b) = if up > tiny && down > tiny {
            (up, -down)
        } else if up > tiny {
            (up, (bounds.upper()[i] - x0[i]).min(2.0 * delta))
        } else {
            (-down, -(x0[i] - bounds.lower()[i]).min(2.0 * delta))
        };
        // When the box is too thin for a second distinct offset, halve the first.
        let b = if (a - b).abs() <= tiny { a / 2.0 } else { b };
        for off in [a, b] {
            let mut p = x0.to_vec();
            p[i] += off;
            bounds.clip(&mut p);
            pts.push(p);
        }
    }
    pts
}

/// Evaluates a fresh stencil around `x0` (whose value is already known) and
/// fits the initial model. `None` once the budget runs out.
fn build_set<F: FnMut(&[f64]) -> f64>(
    ev: &mut Evaluator<'_, F>,
    x0: &[f64],
    f0: f64,
    delta: f64,
) -> Option<(InterpolationSet, Quadratic)> {
    let bounds = ev.bounds().clone();
    let pts = stencil(x0, &bounds, delta);
    let mut values = vec![f0];
    for p in &pts[1..] {
        values.push(ev.eval(p)?);
    }
    let centre = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map_or(0, |(i, _)| i);
    let set = InterpolationSet {
        points: pts,
        values,
        centre,
    };
    let mut model = Quadratic::zero(x0);
    // The stencil is always poised, so this only fails on non-finite values.
    set.refit(&mut model, delta);
    Some((set, model))
}

/// Bounded trust-region minimization with a `2N + 1`-point quadratic model.
///
/// Steps are accepted when the ratio of actual to predicted reduction exceeds
/// 0.1; the radius doubles above 0.7 and halves below 0.1. The run stops
/// early once the radius falls below `rho_end`. A degenerate interpolation
/// set is discarded and rebuilt around the incumbent with radius
/// `rho_begin / 10`.
pub fn tr_quadratic_optimize<F: FnMut(&[f64]) -> f64>(
    problem: &mut ScalarProblem<F>,
    x_init: &[f64],
    rho_begin: f64,
    rho_end: f64,
) -> Result<EvaluationTrace> {
    if !(rho_end > 0.0 && rho_end < rho_begin) {
        return Err(Error::precondition(format!(
            "trust-region radii need 0 < rho_end < rho_begin (got {rho_end}, {rho_begin})"
        )));
    }
    let x0 = prepare_start(&problem.bounds, x_init)?;
    let n = x0.len();
    let mut ev = Evaluator::new(problem);
    let bounds = ev.bounds().clone();
    let max_radius = bounds.max_width();

    let f0 = ev.eval(&x0).expect("budget is at least one");
    let mut delta = rho_begin;
    let Some((mut set, mut model)) = build_set(&mut ev, &x0, f0, delta) else {
        return Ok(ev.finish(false));
    };
    let mut healthy = model.c.is_finite();

    loop {
        if ev.exhausted() {
            return Ok(ev.finish(false));
        }
        if !healthy {
            log::debug!("interpolation set degenerate; rebuilding stencil");
            delta = (rho_begin / 10.0).max(2.0 * rho_end);
            let centre = set.centre_point().to_vec();
            let value = set.values[set.centre];
            match build_set(&mut ev, &centre, value, delta) {
                Some((s, m)) => {
                    set = s;
                    model = m;
                    healthy = true;
                    continue;
                }
                None => return Ok(ev.finish(false)),
            }
        }

        let xc = set.centre_point().to_vec();
        let fc = set.values[set.centre];
        model.rebase(&xc);
        let lo: Vec<f64> = (0..n).map(|i| (bounds.lower()[i] - xc[i]).max(-delta)).collect();
        let hi: Vec<f64> = (0..n).map(|i| (bounds.upper()[i] - xc[i]).min(delta)).collect();
        let (step, predicted) = model.minimize_in_box(&lo, &hi);
        let step_len = step.iter().fold(0.0f64, |m, s| m.max(s.abs()));

        if step_len < SHORT_STEP * delta || !(predicted > 0.0) {
            let far = set.farthest().filter(|&j| set.inf_dist(j) > FAR_POINT * delta);
            let geometry = far.and_then(|j| set.geometry_point(&bounds, j, delta).map(|y| (j, y)));
            match geometry {
                Some((slot, candidate)) => {
                    let Some(value) = ev.eval(&candidate) else {
                        return Ok(ev.finish(false));
                    };
                    set.replace(slot, candidate, value);
                    if value < fc {
                        set.centre = slot;
                    }
                    healthy = set.refit(&mut model, delta);
                }
                None => {
                    delta *= SHRINK;
                    if delta < rho_end {
                        return Ok(ev.finish(true));
                    }
                }
            }
            continue;
        }

        let mut trial: Vec<f64> = xc.iter().zip(&step).map(|(x, s)| x + s).collect();
        bounds.clip(&mut trial);
        let Some(value) = ev.eval(&trial) else {
            return Ok(ev.finish(false));
        };
        let ratio = (fc - value) / predicted;

        let slot = set.replacement_index(&trial, delta).or_else(|| set.farthest());
        if let Some(slot) = slot {
            set.replace(slot, trial, value);
            if ratio > ACCEPT_RATIO && value < fc {
                set.centre = slot;
            }
            healthy = set.refit(&mut model, delta);
        }

        if ratio < ACCEPT_RATIO {
            delta *= SHRINK;
        } else if ratio > EXPAND_RATIO {
            delta = (delta * EXPAND).min(max_radius);
        }
        if delta < rho_end {
            return Ok(ev.finish(true));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(
        f: impl FnMut(&[f64]) -> f64,
        bounds: Bounds,
        budget: usize,
        x0: &[f64],
    ) -> EvaluationTrace {
        let settings = TrustRegionSettings::for_bounds(&bounds);
        let mut p = ScalarProblem::new(f, bounds, budget).unwrap();
        tr_quadratic_optimize(&mut p, x0, settings.rho_begin, settings.rho_end).unwrap()
    }

    #[test]
    fn weighted_quadratic_reaches_optimum() {
        let f = |x: &[f64]| x.iter().enumerate().map(|(i, v)| (i + 1) as f64 * v * v).sum::<f64>();
        let trace = run(f, Bounds::uniform(2, -5.0, 5.0).unwrap(), 50, &[3.0, 3.0]);
        assert!(trace.best_value <= 1e-6, "best {}", trace.best_value);
    }

    #[test]
    fn linear_objective_reaches_corner() {
        let f = |x: &[f64]| x.iter().sum::<f64>();
        let trace = run(f, Bounds::uniform(2, -5.0, 5.0).unwrap(), 100, &[0.0, 0.0]);
        for v in &trace.best_x {
            assert!((v + 5.0).abs() < 1e-6, "best_x {:?}", trace.best_x);
        }
    }

    #[test]
    fn radius_order_is_checked() {
        let mut p = ScalarProblem::new(|x: &[f64]| x[0], Bounds::uniform(1, 0.0, 1.0).unwrap(), 10).unwrap();
        assert!(tr_quadratic_optimize(&mut p, &[0.5], 1e-8, 0.1).is_err());
        assert!(tr_quadratic_optimize(&mut p, &[0.5], 0.1, 0.0).is_err());
    }

    #[test]
    fn terminates_early_at_optimum_with_large_budget() {
        let f = |x: &[f64]| x.iter().map(|v| (v - 0.5).powi(2)).sum::<f64>();
        let trace = run(f, Bounds::uniform(3, -5.0, 5.0).unwrap(), 100_000, &[0.0; 3]);
        assert!(trace.terminated_early);
        assert!(trace.best_value < 1e-12);
    }

    #[test]
    fn budget_below_stencil_returns_best_stencil_point() {
        let f = |x: &[f64]| (x[0] - 2.0).powi(2) + x[1].powi(2) + x[2].powi(2);
        let trace = run(f, Bounds::uniform(3, -5.0, 5.0).unwrap(), 4, &[0.0; 3]);
        assert_eq!(trace.len(), 4);
        assert_eq!(trace.best_x, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn stencil_respects_bounds() {
        let bounds = Bounds::uniform(2, -1.0, 1.0).unwrap();
        for x0 in [[1.0, -1.0], [0.99, 0.0], [-1.0, 1.0]] {
            let pts = stencil(&x0, &bounds, 0.2);
            assert_eq!(pts.len(), 5);
            for p in &pts {
                assert!(bounds.contains(p));
            }
            for i in 0..2 {
                let a = pts[1 + 2 * i][i] - x0[i];
                let b = pts[2 + 2 * i][i] - x0[i];
                assert!(a.abs() > 1e-6 && b.abs() > 1e-6 && (a - b).abs() > 1e-6);
            }
        }
    }

    #[test]
    fn stencil_model_is_exact_for_separable_quadratics() {
        let f = |x: &[f64]| 3.0 * (x[0] - 1.0).powi(2) + 0.5 * x[1] * x[1] - x[1];
        let bounds = Bounds::uniform(2, -5.0, 5.0).unwrap();
        let mut p = ScalarProblem::new(f, bounds, 10).unwrap();
        let mut ev = Evaluator::new(&mut p);
        let f0 = ev.eval(&[0.0, 0.0]).unwrap();
        let (_, model) = build_set(&mut ev, &[0.0, 0.0], f0, 1.0).unwrap();
        for y in [[0.3, -2.0], [4.0, 1.0]] {
            assert!((model.value(&y) - f(&y)).abs() < 1e-9);
        }
        assert!(model.h[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn least_change_update_interpolates_new_point() {
        let f = |x: &[f64]| x[0] * x[1] + x[0] * x[0];
        let bounds = Bounds::uniform(2, -5.0, 5.0).unwrap();
        let mut p = ScalarProblem::new(f, bounds, 10).unwrap();
        let mut ev = Evaluator::new(&mut p);
        let f0 = ev.eval(&[0.0, 0.0]).unwrap();
        let (mut set, mut model) = build_set(&mut ev, &[0.0, 0.0], f0, 1.0).unwrap();
        let y = vec![0.7, 0.6];
        let slot = set.replacement_index(&y, 1.0).unwrap();
        set.replace(slot, y.clone(), f(&y));
        assert!(set.refit(&mut model, 1.0));
        for (pt, v) in set.points.iter().zip(&set.values) {
            assert!((model.value(pt) - v).abs() < 1e-9);
        }
        assert!(model.h[(0, 1)].abs() > 1e-3);
    }

    #[test]
    fn box_subproblem_handles_indefinite_curvature() {
        let mut q = Quadratic::zero(&[0.0, 0.0]);
        q.h = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 2.0]);
        q.g = DVector::from_vec(vec![0.1, -1.0]);
        let (s, pred) = q.minimize_in_box(&[-1.0, -1.0], &[1.0, 1.0]);
        assert_eq!(s, vec![-1.0, 0.5]);
        assert!((pred - (0.1 + 0.5 + 0.25)).abs() < 1e-12);
    }

    #[test]
    fn rosenbrock_makes_progress() {
        let f = |x: &[f64]| 100.0 * (x[1] - x[0] * x[0]).powi(2) + (1.0 - x[0]).powi(2);
        let trace = run(f, Bounds::uniform(2, -5.0, 5.0).unwrap(), 400, &[-1.2, 1.0]);
        assert!(trace.best_value < 1e-2, "best {}", trace.best_value);
    }
}

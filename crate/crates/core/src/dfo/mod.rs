//! Bounded derivative-free single-objective optimization under a hard
//! evaluation budget.
//!
//! Every optimizer here shares one contract: it evaluates `x_init` first,
//! never calls the objective more than `max_evals` times, never evaluates
//! outside the box, and records every call in order.

mod nelder_mead;
mod trust_region;

use std::fmt;
use std::str::FromStr;

pub use nelder_mead::nelder_mead_optimize;
pub use trust_region::{tr_quadratic_optimize, TrustRegionSettings};

use crate::{DecisionVector, Error, Result};

/// Box constraints `lower <= x <= upper`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bounds {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Bounds {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        Error::check_dim(lower.len(), upper.len())?;
        if lower.is_empty() {
            return Err(Error::precondition("bounds must have at least one coordinate"));
        }
        if lower.iter().zip(&upper).any(|(lo, hi)| !(lo < hi)) {
            return Err(Error::precondition("every lower bound must be below its upper bound"));
        }
        Ok(Bounds { lower, upper })
    }

    pub fn uniform(dim: usize, lower: f64, upper: f64) -> Result<Self> {
        Bounds::new(vec![lower; dim], vec![upper; dim])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn center(&self) -> DecisionVector {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(lo, hi)| (lo + hi) / 2.0)
            .collect()
    }

    pub fn min_width(&self) -> f64 {
        self.widths().fold(f64::INFINITY, f64::min)
    }

    pub fn max_width(&self) -> f64 {
        self.widths().fold(0.0, f64::max)
    }

    fn widths(&self) -> impl Iterator<Item = f64> + '_ {
        self.lower.iter().zip(&self.upper).map(|(lo, hi)| hi - lo)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo <= v && v <= hi)
    }

    pub fn clip(&self, x: &mut [f64]) {
        for (v, (lo, hi)) in x.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *v = v.clamp(*lo, *hi);
        }
    }
}

/// A box-constrained scalar minimization problem with an evaluation cap.
pub struct ScalarProblem<F> {
    pub objective: F,
    pub bounds: Bounds,
    pub max_evals: usize,
}

impl<F: FnMut(&[f64]) -> f64> ScalarProblem<F> {
    pub fn new(objective: F, bounds: Bounds, max_evals: usize) -> Result<Self> {
        if max_evals == 0 {
            return Err(Error::precondition("max_evals must be at least 1"));
        }
        Ok(ScalarProblem {
            objective,
            bounds,
            max_evals,
        })
    }
}

/// Every evaluation performed by one optimizer call.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationTrace {
    pub records: Vec<(DecisionVector, f64)>,
    pub best_x: DecisionVector,
    pub best_value: f64,
    /// Set when the optimizer stopped on its own criterion before the budget ran out.
    pub terminated_early: bool,
}

impl EvaluationTrace {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// Budget-enforcing wrapper around the objective callback.
pub(crate) struct Evaluator<'a, F> {
    objective: &'a mut F,
    bounds: &'a Bounds,
    max_evals: usize,
    records: Vec<(DecisionVector, f64)>,
    best: Option<usize>,
}

impl<'a, F: FnMut(&[f64]) -> f64> Evaluator<'a, F> {
    pub(crate) fn new(problem: &'a mut ScalarProblem<F>) -> Self {
        Evaluator {
            objective: &mut problem.objective,
            bounds: &problem.bounds,
            max_evals: problem.max_evals,
            records: Vec::with_capacity(problem.max_evals.min(4096)),
            best: None,
        }
    }

    pub(crate) fn bounds(&self) -> &Bounds {
        self.bounds
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.records.len() >= self.max_evals
    }

    /// Evaluates a point already inside the box; `None` once the budget is spent.
    pub(crate) fn eval(&mut self, x: &[f64]) -> Option<f64> {
        if self.exhausted() {
            return None;
        }
        debug_assert!(self.bounds.contains(x));
        let raw = (self.objective)(x);
        // NaN would poison every comparison downstream.
        let value = if raw.is_nan() { f64::INFINITY } else { raw };
        self.records.push((x.to_vec(), value));
        let idx = self.records.len() - 1;
        if self.best.is_none_or(|b| value < self.records[b].1) {
            self.best = Some(idx);
        }
        Some(value)
    }

    pub(crate) fn finish(self, terminated_early: bool) -> EvaluationTrace {
        let best = self.best.expect("at least one evaluation");
        let (best_x, best_value) = self.records[best].clone();
        EvaluationTrace {
            records: self.records,
            best_x,
            best_value,
            terminated_early,
        }
    }
}

/// Checks the starting point's dimension and clips it into the box.
pub(crate) fn prepare_start(bounds: &Bounds, x_init: &[f64]) -> Result<DecisionVector> {
    Error::check_dim(bounds.dim(), x_init.len())?;
    let mut x = x_init.to_vec();
    if !bounds.contains(&x) {
        log::warn!("initial point lies outside the box; clipping it");
        bounds.clip(&mut x);
    }
    Ok(x)
}

/// Available optimizers.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OptimizerKind {
    /// Quadratic-model trust region with default radii.
    #[default]
    TrustRegion,
    NelderMead,
}

impl OptimizerKind {
    pub fn name(self) -> &'static str {
        match self {
            OptimizerKind::TrustRegion => "trust-region",
            OptimizerKind::NelderMead => "nelder-mead",
        }
    }
}

impl fmt::Display for OptimizerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OptimizerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trust-region" | "tr" | "bobyqa" => Ok(OptimizerKind::TrustRegion),
            "nelder-mead" | "nm" => Ok(OptimizerKind::NelderMead),
            other => Err(Error::Unsupported(format!("optimizer `{other}`"))),
        }
    }
}

/// Minimize with the chosen optimizer and its default settings.
pub fn optimize<F: FnMut(&[f64]) -> f64>(
    kind: OptimizerKind,
    problem: &mut ScalarProblem<F>,
    x_init: &[f64],
) -> Result<EvaluationTrace> {
    match kind {
        OptimizerKind::TrustRegion => {
            let settings = TrustRegionSettings::for_bounds(&problem.bounds);
            tr_quadratic_optimize(problem, x_init, settings.rho_begin, settings.rho_end)
        }
        OptimizerKind::NelderMead => nelder_mead_optimize(problem, x_init),
    }
}

//! The two-phase orchestrator.
//!
//! Phase one runs the scalar optimizer once per weight vector, each run
//! capped at `budget^opt = ⌊budget · r_1st / K⌋` evaluations, and keeps the
//! best ledger entry per weight. Phase two fits a Bézier simplex through
//! those solutions and evaluates it on an even parameter grid until the
//! budget is gone.

mod ledger;

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bezier::{center_outward_order, fit_ols, simplex_grid, FitOutcome, SimplexParam};
use crate::dfo::{optimize, Bounds, OptimizerKind, ScalarProblem};
use crate::problems::MultiObjectiveProblem;
use crate::scalarize::{weight_set, RefPoints, WeightVector};
use crate::{DecisionVector, Error, ObjectiveVector, Result};

pub use ledger::{EvaluationLedger, LedgerEntry};

/// Parameters of one TPB run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TpbConfig {
    /// Number of weight vectors.
    pub k: usize,
    /// Bézier simplex degree.
    pub degree: u32,
    /// Share of the budget given to phase one.
    pub r_1st: f64,
    /// Total number of objective evaluations.
    pub budget: usize,
    pub optimizer: OptimizerKind,
    /// Only the Latin hypercube of `run_tpb2` is random.
    pub seed: u64,
}

impl TpbConfig {
    /// `K = 3`, `D = 2`, `r_1st = 0.9` and the trust-region optimizer.
    pub fn for_budget(budget: usize) -> Self {
        TpbConfig {
            k: 3,
            degree: 2,
            r_1st: 0.9,
            budget,
            optimizer: OptimizerKind::default(),
            seed: 0,
        }
    }

    /// Checks the field invariants for `m` objectives.
    pub fn validate(&self, m: usize) -> Result<()> {
        if self.k < m {
            return Err(Error::config(
                "K",
                format!("{} weights cannot cover {m} objectives", self.k),
            ));
        }
        if self.degree < 1 {
            return Err(Error::config("D", "degree must be at least 1"));
        }
        if !(self.r_1st > 0.0 && self.r_1st < 1.0) {
            return Err(Error::config("r1st", format!("{} is outside (0, 1)", self.r_1st)));
        }
        if self.budget < self.k {
            return Err(Error::config(
                "budget",
                format!("{} is smaller than K = {}", self.budget, self.k),
            ));
        }
        Ok(())
    }
}

/// `⌊budget · r_1st / K⌋`, the evaluation cap of each phase-one run.
pub fn phase_budget(budget: usize, r_1st: f64, k: usize) -> Result<usize> {
    if k == 0 || !(r_1st > 0.0 && r_1st < 1.0) {
        return Err(Error::config("r1st", "need K >= 1 and 0 < r1st < 1"));
    }
    let b = (budget as f64 * r_1st / k as f64).floor() as usize;
    if b == 0 {
        return Err(Error::config(
            "budget",
            format!("{budget} leaves no evaluations per phase-one run"),
        ));
    }
    Ok(b)
}

/// Outcome of phase one.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseOneResult {
    pub weights: Vec<WeightVector>,
    /// `b_star[k]` is the best ledger entry for `weights[k]`.
    pub b_star: Vec<DecisionVector>,
    pub ref_points: RefPoints,
    pub evals_used: usize,
}

/// Outcome of phase two.
#[derive(Debug, Clone)]
pub struct PhaseTwoResult {
    pub fit: FitOutcome,
    /// The interpolation grid, in grid order.
    pub t_int: Vec<SimplexParam>,
    /// Evaluated `(b(t), f(b(t)))` pairs in evaluation order.
    pub points: Vec<(DecisionVector, ObjectiveVector)>,
}

fn score(v: Result<f64>) -> f64 {
    match v {
        Ok(v) if !v.is_nan() => v,
        _ => f64::INFINITY,
    }
}

fn best_per_weight(
    ledger: &EvaluationLedger,
    weights: &[WeightVector],
    refs: &RefPoints,
) -> Vec<DecisionVector> {
    weights
        .iter()
        .map(|w| {
            ledger
                .argmin(|f| score(refs.normalized_weighted_sum(w, f)))
                .expect("ledger is non-empty")
                .x
                .clone()
        })
        .collect()
}

/// Runs phase one on an empty ledger.
///
/// Each pure objective is optimized from the box center. Every other weight
/// is then optimized on the normalized weighted sum, with reference points
/// re-derived from the ledger and a warm start at the ledger's best entry
/// for that weight. The optimizer may stop early; runs that find the ledger
/// full are skipped.
pub fn first_phase<P: MultiObjectiveProblem + ?Sized>(
    problem: &P,
    cfg: &TpbConfig,
    ledger: &mut EvaluationLedger,
) -> Result<PhaseOneResult> {
    if !ledger.is_empty() {
        return Err(Error::precondition("phase one needs an empty ledger"));
    }
    let m = problem.n_objectives();
    cfg.validate(m)?;
    let budget_opt = phase_budget(cfg.budget, cfg.r_1st, cfg.k)?;
    let weights = weight_set(cfg.k, m)?;
    let bounds = problem.bounds().clone();
    let center = bounds.center();

    for obj in 0..m {
        let cap = budget_opt.min(ledger.remaining());
        if cap == 0 {
            break;
        }
        let mut sp = ScalarProblem::new(
            |x: &[f64]| ledger.evaluate(problem, x)[obj],
            bounds.clone(),
            cap,
        )?;
        optimize(cfg.optimizer, &mut sp, &center)?;
    }

    for w in weights.iter().filter(|w| !w.is_extreme()) {
        let cap = budget_opt.min(ledger.remaining());
        if cap == 0 {
            break;
        }
        let refs = ledger.ref_points()?;
        let g = |f: &[f64]| score(refs.normalized_weighted_sum(w, f));
        let start = ledger.argmin(g).expect("ledger is non-empty").x.clone();
        let mut sp = ScalarProblem::new(
            |x: &[f64]| g(&ledger.evaluate(problem, x)),
            bounds.clone(),
            cap,
        )?;
        optimize(cfg.optimizer, &mut sp, &start)?;
    }

    let ref_points = ledger.ref_points()?;
    let b_star = best_per_weight(ledger, &weights, &ref_points);
    Ok(PhaseOneResult {
        weights,
        b_star,
        ref_points,
        evals_used: ledger.len(),
    })
}

/// Fits the Bézier simplex to phase one's solutions and spends the rest of
/// the ledger on it, midpoint of the grid first. Interpolated points are
/// clipped into the box.
pub fn second_phase<P: MultiObjectiveProblem + ?Sized>(
    p1: &PhaseOneResult,
    cfg: &TpbConfig,
    ledger: &mut EvaluationLedger,
    problem: &P,
) -> Result<PhaseTwoResult> {
    let m = problem.n_objectives();
    if p1.weights.len() != p1.b_star.len() {
        return Err(Error::precondition("one solution per weight is required"));
    }
    let samples: Vec<(SimplexParam, DecisionVector)> = p1
        .weights
        .iter()
        .zip(&p1.b_star)
        .map(|(w, b)| (w.as_param().clone(), b.clone()))
        .collect();
    let fit = fit_ols(&samples, m, cfg.degree, problem.n_vars())?;
    let t_int = simplex_grid(m, ledger.remaining(), true)?;
    let bounds: &Bounds = problem.bounds();
    let mut points = Vec::with_capacity(t_int.len());
    for i in center_outward_order(&t_int) {
        if ledger.remaining() == 0 {
            break;
        }
        let mut x = fit.model.evaluate(&t_int[i])?;
        bounds.clip(&mut x);
        let f = ledger.evaluate(problem, &x);
        points.push((x, f));
    }
    Ok(PhaseTwoResult { fit, t_int, points })
}

/// TPB and its two ablations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Both phases.
    Tpb,
    /// Phase one only.
    Tpb1,
    /// Latin hypercube start, then phase two.
    Tpb2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Tpb, Algorithm::Tpb1, Algorithm::Tpb2];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Tpb => "tpb",
            Algorithm::Tpb1 => "tpb1",
            Algorithm::Tpb2 => "tpb2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "tpb" => Ok(Algorithm::Tpb),
            "tpb1" => Ok(Algorithm::Tpb1),
            "tpb2" => Ok(Algorithm::Tpb2),
            other => Err(Error::Unsupported(format!("algorithm `{other}`"))),
        }
    }
}

/// What a run did besides evaluating.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMeta {
    pub algorithm: Algorithm,
    pub budget: usize,
    /// Evaluations spent before the model fit.
    pub budget_1st: usize,
    /// Evaluations available to phase two.
    pub budget_2nd: usize,
    pub b_star: Vec<DecisionVector>,
    /// Fitted model in `BezierSimplex::to_text` form.
    pub model: Option<String>,
    pub rank_deficient: bool,
    pub t_int: Vec<Vec<f64>>,
    /// Wall time of each phase minus the time spent inside the objective.
    pub phase_seconds: [f64; 2],
    pub eval_seconds: f64,
}

impl RunMeta {
    pub fn overhead_seconds(&self) -> f64 {
        self.phase_seconds.iter().sum()
    }
}

/// A finished run.
#[derive(Debug, Clone)]
pub struct TpbRun {
    pub ledger: EvaluationLedger,
    pub meta: RunMeta,
}

struct PhaseClock {
    start: Instant,
    eval_before: Duration,
}

impl PhaseClock {
    fn start(ledger: &EvaluationLedger) -> Self {
        PhaseClock {
            start: Instant::now(),
            eval_before: ledger.eval_time(),
        }
    }

    fn overhead(&self, ledger: &EvaluationLedger) -> f64 {
        let eval = ledger.eval_time() - self.eval_before;
        self.start.elapsed().saturating_sub(eval).as_secs_f64()
    }
}

fn finish(
    algorithm: Algorithm,
    ledger: EvaluationLedger,
    b_star: Vec<DecisionVector>,
    budget_1st: usize,
    phase_two: Option<PhaseTwoResult>,
    phase_seconds: [f64; 2],
) -> TpbRun {
    let budget = ledger.capacity();
    let (model, rank_deficient, t_int) = match &phase_two {
        Some(p2) => (
            Some(p2.fit.model.to_text()),
            p2.fit.rank_deficient,
            p2.t_int.iter().map(|t| t.as_slice().to_vec()).collect(),
        ),
        None => (None, false, Vec::new()),
    };
    let meta = RunMeta {
        algorithm,
        budget,
        budget_1st,
        budget_2nd: if phase_two.is_some() { budget - budget_1st } else { 0 },
        b_star,
        model,
        rank_deficient,
        t_int,
        phase_seconds,
        eval_seconds: ledger.eval_time().as_secs_f64(),
    };
    TpbRun { ledger, meta }
}

/// Phase one followed by phase two.
pub fn run_tpb<P: MultiObjectiveProblem + ?Sized>(problem: &P, cfg: &TpbConfig) -> Result<TpbRun> {
    let mut ledger = EvaluationLedger::new(cfg.budget);
    let clock = PhaseClock::start(&ledger);
    let p1 = first_phase(problem, cfg, &mut ledger)?;
    let t1 = clock.overhead(&ledger);
    let clock = PhaseClock::start(&ledger);
    let p2 = second_phase(&p1, cfg, &mut ledger, problem)?;
    let t2 = clock.overhead(&ledger);
    Ok(finish(Algorithm::Tpb, ledger, p1.b_star, p1.evals_used, Some(p2), [t1, t2]))
}

/// Phase one only; the rest of the budget is left unspent.
pub fn run_tpb1<P: MultiObjectiveProblem + ?Sized>(problem: &P, cfg: &TpbConfig) -> Result<TpbRun> {
    let mut ledger = EvaluationLedger::new(cfg.budget);
    let clock = PhaseClock::start(&ledger);
    let p1 = first_phase(problem, cfg, &mut ledger)?;
    let t1 = clock.overhead(&ledger);
    Ok(finish(Algorithm::Tpb1, ledger, p1.b_star, p1.evals_used, None, [t1, 0.0]))
}

/// Size of the initial design used by `run_tpb2`.
pub fn tpb2_initial_size(n_vars: usize) -> usize {
    11 * n_vars - 1
}

/// Phase two seeded from a Latin hypercube of `11N − 1` points instead of
/// phase one.
pub fn run_tpb2<P: MultiObjectiveProblem + ?Sized>(problem: &P, cfg: &TpbConfig) -> Result<TpbRun> {
    let m = problem.n_objectives();
    cfg.validate(m)?;
    let n0 = tpb2_initial_size(problem.n_vars());
    if cfg.budget <= n0 {
        return Err(Error::config(
            "budget",
            format!("{} does not exceed the initial design size {n0}", cfg.budget),
        ));
    }
    let mut ledger = EvaluationLedger::new(cfg.budget);
    let clock = PhaseClock::start(&ledger);
    for x in latin_hypercube(n0, problem.bounds(), cfg.seed) {
        ledger.evaluate(problem, &x);
    }
    let weights = weight_set(cfg.k, m)?;
    let ref_points = ledger.ref_points()?;
    let b_star = best_per_weight(&ledger, &weights, &ref_points);
    let p1 = PhaseOneResult {
        weights,
        b_star,
        ref_points,
        evals_used: ledger.len(),
    };
    let t1 = clock.overhead(&ledger);
    let clock = PhaseClock::start(&ledger);
    let p2 = second_phase(&p1, cfg, &mut ledger, problem)?;
    let t2 = clock.overhead(&ledger);
    Ok(finish(Algorithm::Tpb2, ledger, p1.b_star, p1.evals_used, Some(p2), [t1, t2]))
}

pub fn run_algorithm<P: MultiObjectiveProblem + ?Sized>(
    algorithm: Algorithm,
    problem: &P,
    cfg: &TpbConfig,
) -> Result<TpbRun> {
    match algorithm {
        Algorithm::Tpb => run_tpb(problem, cfg),
        Algorithm::Tpb1 => run_tpb1(problem, cfg),
        Algorithm::Tpb2 => run_tpb2(problem, cfg),
    }
}

/// `n_points` stratified samples: along every coordinate each of the
/// `n_points` equal-width strata holds exactly one point.
pub fn latin_hypercube(n_points: usize, bounds: &Bounds, seed: u64) -> Vec<DecisionVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = vec![vec![0.0; bounds.dim()]; n_points];
    for d in 0..bounds.dim() {
        let mut strata: Vec<usize> = (0..n_points).collect();
        strata.shuffle(&mut rng);
        let (lo, hi) = (bounds.lower()[d], bounds.upper()[d]);
        for (p, s) in points.iter_mut().zip(strata) {
            let u: f64 = rng.random();
            p[d] = lo + (hi - lo) * (s as f64 + u) / n_points as f64;
        }
    }
    points
}

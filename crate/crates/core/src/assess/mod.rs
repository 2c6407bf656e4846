//! Pareto dominance, the unbounded nondominated archive, 2-D hypervolume,
//! the anytime quality indicator and ECDF aggregation.

use std::fmt::Write as _;

use crate::problems::ReferenceData;
use crate::scalarize::RefPoints;
use crate::{DecisionVector, Error, ObjectiveVector, Result};

/// Number of precision targets per trace.
pub const NUM_TARGETS: usize = 31;

/// `a ≺ b`: no worse everywhere and strictly better somewhere.
pub fn dominates(a: &[f64], b: &[f64]) -> Result<bool> {
    Error::check_dim(a.len(), b.len())?;
    Ok(dominates_unchecked(a, b))
}

fn dominates_unchecked(a: &[f64], b: &[f64]) -> bool {
    let mut strictly = false;
    for (x, y) in a.iter().zip(b) {
        if x > y {
            return false;
        }
        strictly |= x < y;
    }
    strictly
}

/// The points of `points` not dominated by any other, with duplicates
/// collapsed. Two-objective inputs come back sorted by the first objective;
/// otherwise input order is kept.
pub fn nondominated_filter(points: &[ObjectiveVector]) -> Vec<ObjectiveVector> {
    if points.first().is_some_and(|p| p.len() == 2) && points.iter().all(|p| p.len() == 2) {
        let mut sorted: Vec<&ObjectiveVector> = points.iter().collect();
        sorted.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
        let mut best_second = f64::INFINITY;
        let mut out = Vec::new();
        for p in sorted {
            if p[1] < best_second {
                best_second = p[1];
                out.push(p.clone());
            }
        }
        return out;
    }
    let mut out: Vec<ObjectiveVector> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let beaten = points
            .iter()
            .enumerate()
            .any(|(j, q)| j != i && (dominates_unchecked(q, p) || (q == p && j < i)));
        if !beaten {
            out.push(p.clone());
        }
    }
    out
}

/// Every mutually nondominated `(x, f)` pair seen so far.
#[derive(Debug, Clone, Default)]
pub struct Archive {
    entries: Vec<(DecisionVector, ObjectiveVector)>,
}

impl Archive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Inserts `f` unless an archived point dominates or equals it, evicting
    /// everything `f` dominates. Returns whether the point was kept.
    pub fn insert(&mut self, x: DecisionVector, f: ObjectiveVector) -> bool {
        if self
            .entries
            .iter()
            .any(|(_, g)| g == &f || dominates_unchecked(g, &f))
        {
            return false;
        }
        self.entries.retain(|(_, g)| !dominates_unchecked(&f, g));
        self.entries.push((x, f));
        true
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(DecisionVector, ObjectiveVector)] {
        &self.entries
    }

    pub fn objectives(&self) -> impl Iterator<Item = &ObjectiveVector> {
        self.entries.iter().map(|(_, f)| f)
    }
}

/// Area dominated by `points` and bounded by `reference`. Points that do not
/// strictly dominate the reference contribute nothing.
pub fn hypervolume_2d(points: &[ObjectiveVector], reference: &[f64]) -> f64 {
    let mut inside: Vec<(f64, f64)> = points
        .iter()
        .filter(|p| p.len() == 2 && p[0] < reference[0] && p[1] < reference[1])
        .map(|p| (p[0], p[1]))
        .collect();
    inside.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut ceiling = reference[1];
    let mut area = 0.0;
    for (a, b) in inside {
        if b < ceiling {
            area += (reference[0] - a) * (ceiling - b);
            ceiling = b;
        }
    }
    area
}

/// Anytime quality of a set of objective vectors; smaller is better.
///
/// Objectives are normalized by the reference ideal/nadir. If any point
/// strictly dominates `(1, 1)`, the value is the hypervolume regret
/// `ref_hv − HV`. Otherwise it is `ref_hv` plus the smallest Euclidean
/// distance to the region `{f ≤ (1, 1)}`. An empty set scores `+∞`.
pub fn indicator_of<'a, I>(objectives: I, refdata: &ReferenceData) -> Result<f64>
where
    I: IntoIterator<Item = &'a ObjectiveVector>,
{
    let refs = &refdata.ref_points;
    let normalized: Vec<ObjectiveVector> = objectives
        .into_iter()
        .map(|f| refs.normalize(f))
        .collect::<Result<_>>()?;
    Ok(indicator_normalized(&normalized, refdata.ref_hv))
}

fn indicator_normalized(normalized: &[ObjectiveVector], ref_hv: f64) -> f64 {
    if normalized.is_empty() {
        return f64::INFINITY;
    }
    let reference = [1.0, 1.0];
    if normalized.iter().any(|p| p[0] < 1.0 && p[1] < 1.0) {
        ref_hv - hypervolume_2d(normalized, &reference)
    } else {
        let distance = normalized
            .iter()
            .map(|p| {
                p.iter()
                    .map(|v| (v - 1.0).max(0.0).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        ref_hv + distance
    }
}

pub fn indicator_value(archive: &Archive, refdata: &ReferenceData) -> Result<f64> {
    indicator_of(archive.objectives(), refdata)
}

/// `ref_hv · 10^e` for `e` evenly spaced over `[-4, 0]`.
pub fn precision_targets(ref_hv: f64) -> Vec<f64> {
    (0..NUM_TARGETS)
        .map(|i| ref_hv * 10f64.powf(-4.0 + 4.0 * i as f64 / (NUM_TARGETS - 1) as f64))
        .collect()
}

/// Indicator value after every evaluation of a run, plus first-hit times for
/// each precision target.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorTrace {
    pub series: Vec<(usize, f64)>,
    pub targets: Vec<f64>,
    pub hits: Vec<Option<usize>>,
}

impl IndicatorTrace {
    /// Replays objective vectors (in evaluation order, indices from 1) through
    /// an archive.
    pub fn from_objectives<'a, I>(objectives: I, refdata: &ReferenceData) -> Result<Self>
    where
        I: IntoIterator<Item = &'a ObjectiveVector>,
    {
        let refs = &refdata.ref_points;
        let mut archive: Vec<ObjectiveVector> = Vec::new();
        let mut series = Vec::new();
        let mut current = f64::INFINITY;
        for (i, f) in objectives.into_iter().enumerate() {
            let g = refs.normalize(f)?;
            if !archive.iter().any(|a| a == &g || dominates_unchecked(a, &g)) {
                archive.retain(|a| !dominates_unchecked(&g, a));
                archive.push(g);
                current = current.min(indicator_normalized(&archive, refdata.ref_hv));
            }
            series.push((i + 1, current));
        }
        Ok(Self::from_series(series, precision_targets(refdata.ref_hv)))
    }

    /// Builds hit times for `targets` from an existing series.
    pub fn from_series(series: Vec<(usize, f64)>, targets: Vec<f64>) -> Self {
        let hits = targets
            .iter()
            .map(|&eps| series.iter().find(|(_, v)| *v <= eps).map(|(e, _)| *e))
            .collect();
        IndicatorTrace {
            series,
            targets,
            hits,
        }
    }

    pub fn final_value(&self) -> f64 {
        self.series.last().map_or(f64::INFINITY, |(_, v)| *v)
    }

    /// CSV with columns `eval_index,indicator_value`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("eval_index,indicator_value\n");
        for (e, v) in &self.series {
            let _ = writeln!(s, "{e},{v}");
        }
        s
    }

    pub fn from_csv(text: &str, ref_hv: f64) -> Result<Self> {
        let bad = |message: String| Error::Format {
            path: "<trace csv>".into(),
            message,
        };
        let mut series = Vec::new();
        for line in text.lines().skip(1).filter(|l| !l.is_empty()) {
            let (e, v) = line
                .split_once(',')
                .ok_or_else(|| bad(format!("bad row `{line}`")))?;
            let e = e.parse().map_err(|_| bad(format!("bad index `{e}`")))?;
            let v = v.parse().map_err(|_| bad(format!("bad value `{v}`")))?;
            series.push((e, v));
        }
        Ok(Self::from_series(series, precision_targets(ref_hv)))
    }
}

/// Fraction of (trace, target) pairs hit within each evaluation count.
pub fn ecdf(traces: &[IndicatorTrace], eval_grid: &[usize]) -> Result<Vec<(usize, f64)>> {
    let first = traces
        .first()
        .ok_or_else(|| Error::precondition("ECDF needs at least one trace"))?;
    let n_targets = first.targets.len();
    if n_targets == 0 || traces.iter().any(|t| t.targets.len() != n_targets) {
        return Err(Error::precondition("all traces must share the same number of targets"));
    }
    let total = (traces.len() * n_targets) as f64;
    Ok(eval_grid
        .iter()
        .map(|&e| {
            let hit = traces
                .iter()
                .flat_map(|t| &t.hits)
                .filter(|h| h.is_some_and(|at| at <= e))
                .count();
            (e, hit as f64 / total)
        })
        .collect())
}

/// CSV with columns `evals_per_dim,fraction`.
pub fn ecdf_csv(curve: &[(usize, f64)], n_vars: usize) -> String {
    let mut s = String::from("evals_per_dim,fraction\n");
    for (e, frac) in curve {
        let _ = writeln!(s, "{},{}", *e as f64 / n_vars as f64, frac);
    }
    s
}

/// Normalizes objective vectors with `refs`.
pub fn normalize_all(points: &[ObjectiveVector], refs: &RefPoints) -> Result<Vec<ObjectiveVector>> {
    points.iter().map(|p| refs.normalize(p)).collect()
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use super::{MultiObjectiveProblem, ProblemInstance};
use crate::assess::{hypervolume_2d, nondominated_filter};
use crate::dfo::{nelder_mead_optimize, optimize, OptimizerKind, ScalarProblem};
use crate::scalarize::{weight_set, RefPoints};
use crate::{Error, ObjectiveVector, Result};

const FORMAT_TAG: &str = "reference_front v1";
const SCALARIZATION_WEIGHTS: usize = 41;
const CHEBYSHEV_WEIGHTS: usize = 21;

/// A discretized Pareto front and its normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct ReferenceData {
    /// Mutually nondominated objective vectors, sorted by the first objective.
    pub front: Vec<ObjectiveVector>,
    /// Hypervolume of the normalized front with respect to `(1, 1)`.
    pub ref_hv: f64,
    /// Extremes of the front.
    pub ref_points: RefPoints,
}

impl ReferenceData {
    fn from_front(points: Vec<ObjectiveVector>) -> Result<Self> {
        let front = nondominated_filter(&points);
        let ref_points = RefPoints::from_objectives(front.iter().map(Vec::as_slice))?;
        let normalized: Vec<ObjectiveVector> = front
            .iter()
            .map(|f| ref_points.normalize(f))
            .collect::<Result<_>>()?;
        let ref_hv = hypervolume_2d(&normalized, &[1.0, 1.0]);
        Ok(ReferenceData {
            front,
            ref_hv,
            ref_points,
        })
    }

    /// Text form: a few `name values...` header lines, then one `f1 f2`
    /// line per front point.
    pub fn to_text(&self, key: &str) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| v.iter().map(f64::to_string).collect::<Vec<_>>().join(" ");
        let _ = writeln!(s, "# {FORMAT_TAG}");
        let _ = writeln!(s, "key {key}");
        let _ = writeln!(s, "ref_hv {}", self.ref_hv);
        let _ = writeln!(s, "z_ideal {}", join(&self.ref_points.ideal));
        let _ = writeln!(s, "z_nadir {}", join(&self.ref_points.nadir));
        let _ = writeln!(s, "points {}", self.front.len());
        for f in &self.front {
            let _ = writeln!(s, "{}", join(f));
        }
        s
    }

    pub fn from_text(text: &str, path: &Path) -> Result<Self> {
        let bad = |message: String| Error::Format {
            path: path.to_path_buf(),
            message,
        };
        let floats = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad number `{v}`"))))
                .collect()
        };
        let mut lines = text.lines();
        if lines.next() != Some(&format!("# {FORMAT_TAG}")) {
            return Err(bad("missing format tag".into()));
        }
        let mut field = |name: &str| -> Result<String> {
            let line = lines.next().ok_or_else(|| bad(format!("missing `{name}`")))?;
            line.strip_prefix(name)
                .map(|rest| rest.trim().to_string())
                .ok_or_else(|| bad(format!("expected `{name}`, found `{line}`")))
        };
        let _key = field("key")?;
        let ref_hv = field("ref_hv")?
            .parse::<f64>()
            .map_err(|_| bad("bad ref_hv".into()))?;
        let ideal = floats(&field("z_ideal")?)?;
        let nadir = floats(&field("z_nadir")?)?;
        let count: usize = field("points")?
            .parse()
            .map_err(|_| bad("bad point count".into()))?;
        let front: Vec<ObjectiveVector> = lines
            .filter(|l| !l.trim().is_empty())
            .map(floats)
            .collect::<Result<_>>()?;
        if front.len() != count {
            return Err(bad(format!("expected {count} points, found {}", front.len())));
        }
        Ok(ReferenceData {
            front,
            ref_hv,
            ref_points: RefPoints::new(ideal, nadir)?,
        })
    }
}

/// A discretized Pareto front of `instance`.
///
/// Bi-sphere fronts are sampled exactly along the segment between the two
/// optima. Other fronts come from a large candidate pool: `resolution²`
/// Halton points, the segment between the optima, and local searches on
/// each objective and on normalized weighted-sum and Chebyshev
/// scalarizations.
pub fn reference_front(instance: &ProblemInstance, resolution: usize) -> Result<ReferenceData> {
    if resolution < 100 {
        return Err(Error::precondition(format!(
            "reference resolution {resolution} is below 100"
        )));
    }
    if instance.is_bi_sphere() {
        let front = (0..resolution)
            .map(|i| {
                let t = i as f64 / (resolution - 1) as f64;
                let x = instance.analytic_pareto_point(t)?;
                instance.evaluate_objectives(&x)
            })
            .collect::<Result<Vec<_>>>()?;
        return ReferenceData::from_front(front);
    }
    ReferenceData::from_front(candidate_pool(instance, resolution)?)
}

fn candidate_pool(instance: &ProblemInstance, resolution: usize) -> Result<Vec<ObjectiveVector>> {
    let n = instance.dim();
    let bounds = instance.bounds().clone();
    let (lo, hi) = (bounds.lower().to_vec(), bounds.upper().to_vec());
    let mut xs: Vec<Vec<f64>> = Vec::new();
    let mut fs: Vec<ObjectiveVector> = Vec::new();
    let record = |x: &[f64], xs: &mut Vec<Vec<f64>>, fs: &mut Vec<ObjectiveVector>| {
        let f = instance.evaluate(x);
        xs.push(x.to_vec());
        fs.push(f.clone());
        f
    };

    let primes = first_primes(n);
    for i in 1..=resolution * resolution {
        let x: Vec<f64> = primes
            .iter()
            .enumerate()
            .map(|(d, &p)| lo[d] + (hi[d] - lo[d]) * radical_inverse(i, p))
            .collect();
        record(&x, &mut xs, &mut fs);
    }
    for i in 0..resolution {
        let t = i as f64 / (resolution - 1) as f64;
        let x: Vec<f64> = instance
            .shift(0)
            .iter()
            .zip(instance.shift(1))
            .map(|(a, b)| a + t * (b - a))
            .collect();
        record(&x, &mut xs, &mut fs);
    }

    let long_run = 200 * (n + 1);
    let short_run = 50 * (n + 1);
    for m in 0..2 {
        let start = instance.shift(m).to_vec();
        let mut p = ScalarProblem::new(
            |x: &[f64]| record(x, &mut xs, &mut fs)[m],
            bounds.clone(),
            long_run,
        )?;
        optimize(OptimizerKind::TrustRegion, &mut p, &start)?;
    }

    let argmin = |fs: &[ObjectiveVector], xs: &[Vec<f64>], g: &dyn Fn(&[f64]) -> f64| {
        let best = (0..fs.len())
            .min_by(|&a, &b| g(&fs[a]).total_cmp(&g(&fs[b])))
            .expect("pool is non-empty");
        xs[best].clone()
    };

    for w in weight_set(SCALARIZATION_WEIGHTS, 2)? {
        let refs = RefPoints::from_objectives(fs.iter().map(Vec::as_slice))?;
        let g = |f: &[f64]| refs.normalized_weighted_sum(&w, f).unwrap_or(f64::INFINITY);
        let start = argmin(&fs, &xs, &g);
        let mut p = ScalarProblem::new(
            |x: &[f64]| g(&record(x, &mut xs, &mut fs)),
            bounds.clone(),
            long_run,
        )?;
        optimize(OptimizerKind::TrustRegion, &mut p, &start)?;
    }

    for w in weight_set(CHEBYSHEV_WEIGHTS, 2)? {
        let refs = RefPoints::from_objectives(fs.iter().map(Vec::as_slice))?;
        let g = |f: &[f64]| match refs.normalize(f) {
            Ok(u) => u
                .iter()
                .zip(w.as_slice())
                .map(|(a, b)| a * b.max(1e-3))
                .fold(f64::NEG_INFINITY, f64::max),
            Err(_) => f64::INFINITY,
        };
        let start = argmin(&fs, &xs, &g);
        let mut p = ScalarProblem::new(
            |x: &[f64]| g(&record(x, &mut xs, &mut fs)),
            bounds.clone(),
            short_run,
        )?;
        nelder_mead_optimize(&mut p, &start)?;
    }
    Ok(fs)
}

/// Van der Corput radical inverse of `i` in base `b`.
fn radical_inverse(mut i: usize, b: usize) -> f64 {
    let inv = 1.0 / b as f64;
    let mut scale = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % b) as f64 * scale;
        i /= b;
        scale *= inv;
    }
    out
}

fn first_primes(count: usize) -> Vec<usize> {
    let mut primes = Vec::with_capacity(count);
    let mut c = 2;
    while primes.len() < count {
        if primes.iter().take_while(|&&p| p * p <= c).all(|p| c % p != 0) {
            primes.push(c);
        }
        c += 1;
    }
    primes
}

static TEMP_COUNTER: AtomicUsize = AtomicUsize::new(0);

/// On-disk cache of reference fronts, one text file per instance key.
///
/// Files are written to a temporary name and renamed into place, so readers
/// never see partial content.
#[derive(Debug, Clone)]
pub struct ReferenceCache {
    dir: PathBuf,
    resolution: usize,
}

impl ReferenceCache {
    pub fn new(dir: impl Into<PathBuf>, resolution: usize) -> Self {
        ReferenceCache {
            dir: dir.into(),
            resolution,
        }
    }

    pub fn key(&self, instance: &ProblemInstance) -> String {
        format!("{}_r{}", instance.key(), self.resolution)
    }

    pub fn path(&self, instance: &ProblemInstance) -> PathBuf {
        self.dir.join(format!("{}.front.txt", self.key(instance)))
    }

    pub fn get(&self, instance: &ProblemInstance) -> Result<ReferenceData> {
        let path = self.path(instance);
        if let Ok(text) = fs::read_to_string(&path) {
            match ReferenceData::from_text(&text, &path) {
                Ok(data) => return Ok(data),
                Err(e) => log::warn!("recomputing unreadable reference front: {e}"),
            }
        }
        let data = reference_front(instance, self.resolution)?;
        fs::create_dir_all(&self.dir)?;
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            self.key(instance),
            std::process::id(),
            TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, data.to_text(&self.key(instance)))?;
        fs::rename(&tmp, &path)?;
        Ok(data)
    }
}

//! Synthetic bi-objective benchmark problems.
//!
//! Each problem pairs two shifted (and possibly rotated) single-objective
//! functions on `[-5, 5]^N`. The `(kinds, N, seed)` triple fully determines
//! an instance.

mod functions;
mod reference;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dfo::Bounds;
use crate::{DecisionVector, Error, ObjectiveVector, Result};

pub use reference::{reference_front, ReferenceCache, ReferenceData};

/// Lower and upper search bound, shared by every coordinate.
pub const SEARCH_BOUND: f64 = 5.0;
/// Optima are drawn from `[-SHIFT_BOUND, SHIFT_BOUND]^N`.
pub const SHIFT_BOUND: f64 = 4.0;

/// Anything TPB can optimize: a box-constrained vector-valued black box.
pub trait MultiObjectiveProblem {
    fn n_vars(&self) -> usize;
    fn n_objectives(&self) -> usize;
    fn bounds(&self) -> &Bounds;
    /// `x` has length `n_vars()`.
    fn evaluate(&self, x: &[f64]) -> ObjectiveVector;
}

/// Single-objective building blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FunctionKind {
    Sphere,
    Ellipsoid,
    Rosenbrock,
    Rastrigin,
    /// Schwefel's problem 1.2: `Σ_i (Σ_{j≤i} z_j)²`.
    SchwefelLike,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 5] = [
        FunctionKind::Sphere,
        FunctionKind::Ellipsoid,
        FunctionKind::Rosenbrock,
        FunctionKind::Rastrigin,
        FunctionKind::SchwefelLike,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FunctionKind::Sphere => "sphere",
            FunctionKind::Ellipsoid => "ellipsoid",
            FunctionKind::Rosenbrock => "rosenbrock",
            FunctionKind::Rastrigin => "rastrigin",
            FunctionKind::SchwefelLike => "schwefel",
        }
    }

    /// Kinds that get a random orthogonal rotation.
    pub fn is_rotated(self) -> bool {
        matches!(self, FunctionKind::Rosenbrock | FunctionKind::Rastrigin)
    }

    pub fn is_multimodal(self) -> bool {
        matches!(self, FunctionKind::Rastrigin)
    }
}

impl fmt::Display for FunctionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FunctionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sphere" => Ok(FunctionKind::Sphere),
            "ellipsoid" => Ok(FunctionKind::Ellipsoid),
            "rosenbrock" => Ok(FunctionKind::Rosenbrock),
            "rastrigin" => Ok(FunctionKind::Rastrigin),
            "schwefel" | "schwefel-like" => Ok(FunctionKind::SchwefelLike),
            other => Err(Error::Unsupported(format!("function kind `{other}`"))),
        }
    }
}

/// An ordered pair of function kinds, written `first/second`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct KindPair(pub FunctionKind, pub FunctionKind);

impl KindPair {
    pub fn is_multimodal(self) -> bool {
        self.0.is_multimodal() || self.1.is_multimodal()
    }

    pub fn label(self) -> &'static str {
        if self.is_multimodal() {
            "multimodal"
        } else {
            "unimodal"
        }
    }
}

impl fmt::Display for KindPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0, self.1)
    }
}

impl FromStr for KindPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Unsupported(format!("kind pair `{s}` (expected `a/b`)")))?;
        Ok(KindPair(a.parse()?, b.parse()?))
    }
}

/// The eight curated kind pairs of the benchmark suite.
pub fn standard_suite() -> Vec<KindPair> {
    use FunctionKind::*;
    vec![
        KindPair(Sphere, Sphere),
        KindPair(Sphere, Ellipsoid),
        KindPair(Sphere, Rosenbrock),
        KindPair(Ellipsoid, Ellipsoid),
        KindPair(Rosenbrock, Rosenbrock),
        KindPair(Sphere, Rastrigin),
        KindPair(Rastrigin, Rastrigin),
        KindPair(Sphere, SchwefelLike),
    ]
}

/// A concrete bi-objective problem.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    kinds: [FunctionKind; 2],
    shifts: [DecisionVector; 2],
    rotations: [Option<DMatrix<f64>>; 2],
    bounds: Bounds,
    seed: u64,
}

/// Builds instance `instance_seed` of the pair `(f1_kind, f2_kind)` in `n`
/// variables.
pub fn make_problem(
    f1_kind: FunctionKind,
    f2_kind: FunctionKind,
    n: usize,
    instance_seed: u64,
) -> Result<ProblemInstance> {
    if n < 2 {
        return Err(Error::precondition("problems need at least two variables"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed);
    rng.set_stream(n as u64);
    let mut shift = || -> DecisionVector {
        (0..n)
            .map(|_| rng.random_range(-SHIFT_BOUND..=SHIFT_BOUND))
            .collect()
    };
    let shifts = [shift(), shift()];
    let kinds = [f1_kind, f2_kind];
    let rotations = kinds.map(|k| k.is_rotated().then(|| random_rotation(n, &mut rng)));
    Ok(ProblemInstance {
        kinds,
        shifts,
        rotations,
        bounds: Bounds::uniform(n, -SEARCH_BOUND, SEARCH_BOUND)?,
        seed: instance_seed,
    })
}

/// Q factor of a Gaussian matrix, with column signs fixed so the draw is
/// uniform over the orthogonal group.
fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let a = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = a.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

impl ProblemInstance {
    pub fn kinds(&self) -> [FunctionKind; 2] {
        self.kinds
    }

    pub fn pair(&self) -> KindPair {
        KindPair(self.kinds[0], self.kinds[1])
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Optimum location of objective `m`.
    pub fn shift(&self, m: usize) -> &[f64] {
        &self.shifts[m]
    }

    /// Rotation of objective `m`, `None` meaning identity.
    pub fn rotation(&self, m: usize) -> Option<&DMatrix<f64>> {
        self.rotations[m].as_ref()
    }

    pub fn is_bi_sphere(&self) -> bool {
        self.kinds == [FunctionKind::Sphere; 2]
    }

    /// Stable identifier such as `sphere-ellipsoid_n10_i3`.
    pub fn key(&self) -> String {
        format!("{}-{}_n{}_i{}", self.kinds[0], self.kinds[1], self.dim(), self.seed)
    }

    pub fn objective(&self, m: usize, x: &[f64]) -> Result<f64> {
        Error::check_dim(self.dim(), x.len())?;
        if m >= 2 {
            return Err(Error::precondition(format!("objective index {m} out of range")));
        }
        Ok(self.objective_unchecked(m, x))
    }

    fn objective_unchecked(&self, m: usize, x: &[f64]) -> f64 {
        let d: Vec<f64> = x.iter().zip(&self.shifts[m]).map(|(a, s)| a - s).collect();
        let z = match &self.rotations[m] {
            Some(r) => (r * nalgebra::DVector::from_vec(d)).data.into(),
            None => d,
        };
        functions::evaluate(self.kinds[m], &z)
    }

    pub fn evaluate_objectives(&self, x: &[f64]) -> Result<ObjectiveVector> {
        Error::check_dim(self.dim(), x.len())?;
        Ok(vec![self.objective_unchecked(0, x), self.objective_unchecked(1, x)])
    }

    /// `shift1 + t (shift2 − shift1)`, a point of the Pareto set of a
    /// bi-sphere problem.
    pub fn analytic_pareto_point(&self, t: f64) -> Result<DecisionVector> {
        if !self.is_bi_sphere() {
            return Err(Error::Unsupported(format!(
                "analytic Pareto set of {}",
                self.pair()
            )));
        }
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::precondition(format!("t = {t} outside [0, 1]")));
        }
        Ok(self.shifts[0]
            .iter()
            .zip(&self.shifts[1])
            .map(|(a, b)| a + t * (b - a))
            .collect())
    }
}

impl MultiObjectiveProblem for ProblemInstance {
    fn n_vars(&self) -> usize {
        self.dim()
    }

    fn n_objectives(&self) -> usize {
        2
    }

    fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    fn evaluate(&self, x: &[f64]) -> ObjectiveVector {
        vec![self.objective_unchecked(0, x), self.objective_unchecked(1, x)]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assess::dominates;
    use FunctionKind::*;

    fn norm2(v: &[f64]) -> f64 {
        v.iter().map(|a| a * a).sum()
    }

    #[test]
    fn determinism() {
        let a = make_problem(Sphere, Sphere, 2, 1).unwrap();
        let b = make_problem(Sphere, Sphere, 2, 1).unwrap();
        assert_eq!(a, b);
        let c = make_problem(Sphere, Sphere, 2, 2).unwrap();
        assert_ne!(a, c);
        let x = [0.3, -1.2];
        assert_eq!(a.evaluate_objectives(&x).unwrap(), a.evaluate_objectives(&x).unwrap());
    }

    #[test]
    fn shifts_inside_inner_box() {
        for seed in 0..20 {
            let p = make_problem(Rosenbrock, Rastrigin, 7, seed).unwrap();
            for m in 0..2 {
                assert!(p.shift(m).iter().all(|s| s.abs() <= SHIFT_BOUND));
            }
        }
    }

    #[test]
    fn rotations_are_orthogonal() {
        let p = make_problem(Rosenbrock, Rastrigin, 5, 3).unwrap();
        for m in 0..2 {
            let r = p.rotation(m).expect("rotated kind");
            let err = (r * r.transpose() - DMatrix::<f64>::identity(5, 5)).abs().max();
            assert!(err < 1e-10, "orthogonality error {err}");
        }
        let s = make_problem(Sphere, Ellipsoid, 5, 3).unwrap();
        assert!(s.rotation(0).is_none() && s.rotation(1).is_none());
    }

    #[test]
    fn optimum_values_are_zero() {
        for &k in &FunctionKind::ALL {
            let p = make_problem(k, Sphere, 6, 4).unwrap();
            let f1 = p.objective(0, p.shift(0)).unwrap();
            assert!(f1.abs() < 1e-20, "{k}: {f1}");
        }
    }

    #[test]
    fn bi_sphere_endpoints() {
        let p = make_problem(Sphere, Sphere, 4, 9).unwrap();
        let d: Vec<f64> = p.shift(0).iter().zip(p.shift(1)).map(|(a, b)| a - b).collect();
        let f = p.evaluate_objectives(p.shift(0)).unwrap();
        assert_eq!(f[0], 0.0);
        assert!((f[1] - norm2(&d)).abs() < 1e-12);
        let g = p.evaluate_objectives(p.shift(1)).unwrap();
        assert!((g[0] - norm2(&d)).abs() < 1e-12);
        assert_eq!(g[1], 0.0);
        assert!(p.evaluate_objectives(&[0.0; 3]).is_err());
    }

    #[test]
    fn analytic_points() {
        let p = make_problem(Sphere, Sphere, 3, 2).unwrap();
        assert_eq!(p.analytic_pareto_point(0.0).unwrap(), p.shift(0));
        assert_eq!(p.analytic_pareto_point(1.0).unwrap(), p.shift(1));
        let mid = p.analytic_pareto_point(0.5).unwrap();
        let fm = p.evaluate_objectives(&mid).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-5.0..5.0)).collect();
            let fx = p.evaluate_objectives(&x).unwrap();
            assert!(!dominates(&fx, &fm).unwrap());
        }
        let q = make_problem(Sphere, Ellipsoid, 3, 2).unwrap();
        assert!(matches!(q.analytic_pareto_point(0.5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("schwefel-like".parse::<FunctionKind>().unwrap(), SchwefelLike);
        assert!("griewank".parse::<FunctionKind>().is_err());
        let pair: KindPair = "sphere/rastrigin".parse().unwrap();
        assert_eq!(pair, KindPair(Sphere, Rastrigin));
        assert_eq!(pair.to_string().parse::<KindPair>().unwrap(), pair);
        assert_eq!(pair.label(), "multimodal");
        assert_eq!(standard_suite().len(), 8);
        assert!(make_problem(Sphere, Sphere, 1, 0).is_err());
    }
}

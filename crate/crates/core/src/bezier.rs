//! Bézier simplices: evaluation, least-squares fitting and parameter grids.
//!
//! A Bézier simplex of degree `D` maps the standard `(M-1)`-simplex into the
//! search space through `b(t) = Σ_d binom(D, d) t^d p_d`, where `d` ranges over
//! all multi-indices of length `M` summing to `D`. Multi-indices are always
//! enumerated in ascending lexicographic order; design matrices, serialized
//! models and control-point vectors all follow that order.

use std::fmt::Write as _;

use nalgebra::DMatrix;

use crate::{DecisionVector, Error, Result};

const SIMPLEX_TOL: f64 = 1e-12;

/// Exponent vector of one Bernstein term.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// A point of the standard simplex: non-negative entries summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexParam(Vec<f64>);

impl SimplexParam {
    pub fn new(t: Vec<f64>) -> Result<Self> {
        if t.is_empty() {
            return Err(Error::precondition("simplex parameter must be non-empty"));
        }
        if t.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
            return Err(Error::precondition(format!(
                "simplex parameter has a negative or non-finite entry: {t:?}"
            )));
        }
        let sum: f64 = t.iter().sum();
        if (sum - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::precondition(format!(
                "simplex parameter sums to {sum}, not 1"
            )));
        }
        Ok(SimplexParam(t))
    }

    /// Unit vector `e_m` of length `dim`.
    pub fn vertex(dim: usize, m: usize) -> Self {
        let mut t = vec![0.0; dim];
        t[m] = 1.0;
        SimplexParam(t)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

/// `D! / (d_1! ... d_M!)`, computed as a product of binomials in integer
/// arithmetic.
pub fn multinomial_coefficient(degree: u32, d: &MultiIndex) -> Result<u128> {
    if d.degree() != degree {
        return Err(Error::precondition(format!(
            "multi-index {:?} sums to {}, expected {degree}",
            d.0,
            d.degree()
        )));
    }
    let mut acc: u128 = 1;
    let mut remaining = degree as u128;
    for &part in &d.0 {
        acc = acc
            .checked_mul(binomial(remaining, part as u128))
            .ok_or_else(|| Error::precondition("multinomial coefficient overflows u128"))?;
        remaining -= part as u128;
    }
    Ok(acc)
}

fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    // Each partial product is itself a binomial coefficient, so the division is exact.
    (0..k).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

/// Number of multi-indices of length `m` summing to `degree`.
pub fn num_multi_indices(m: usize, degree: u32) -> usize {
    if m == 0 {
        return 0;
    }
    binomial(degree as u128 + m as u128 - 1, m as u128 - 1) as usize
}

/// All multi-indices of length `m` summing to `degree`, ascending lexicographic.
pub fn enumerate_multi_indices(m: usize, degree: u32) -> Result<Vec<MultiIndex>> {
    if m == 0 {
        return Err(Error::precondition("multi-index length must be at least 1"));
    }
    let mut out = Vec::with_capacity(num_multi_indices(m, degree));
    let mut prefix = Vec::with_capacity(m);
    fill_indices(m, degree, &mut prefix, &mut out);
    Ok(out)
}

fn fill_indices(m: usize, remaining: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if prefix.len() + 1 == m {
        prefix.push(remaining);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in 0..=remaining {
        prefix.push(first);
        fill_indices(m, remaining - first, prefix, out);
        prefix.pop();
    }
}

/// Bernstein basis values `binom(D, d) t^d` for every index, in the order of
/// `indices`. `0^0` is taken as 1.
fn bernstein_terms(indices: &[MultiIndex], coefficients: &[f64], t: &[f64]) -> Vec<f64> {
    indices
        .iter()
        .zip(coefficients)
        .map(|(d, &c)| {
            d.0.iter()
                .zip(t)
                .fold(c, |acc, (&e, &tm)| acc * tm.powi(e as i32))
        })
        .collect()
}

/// Bernstein basis of degree `degree` at `t`, in enumeration order.
pub fn bernstein_basis(degree: u32, t: &SimplexParam) -> Result<Vec<f64>> {
    let indices = enumerate_multi_indices(t.dim(), degree)?;
    let coefficients = coefficients_for(degree, &indices)?;
    Ok(bernstein_terms(&indices, &coefficients, t.as_slice()))
}

fn coefficients_for(degree: u32, indices: &[MultiIndex]) -> Result<Vec<f64>> {
    indices
        .iter()
        .map(|d| multinomial_coefficient(degree, d).map(|c| c as f64))
        .collect()
}

/// A Bézier simplex `Δ^{M-1} → ℝ^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct BezierSimplex {
    n_objectives: usize,
    degree: u32,
    n_vars: usize,
    indices: Vec<MultiIndex>,
    coefficients: Vec<f64>,
    control_points: Vec<DecisionVector>,
}

impl BezierSimplex {
    /// Build a model from control points listed in enumeration order.
    pub fn new(n_objectives: usize, degree: u32, control_points: Vec<DecisionVector>) -> Result<Self> {
        let indices = enumerate_multi_indices(n_objectives, degree)?;
        Error::check_dim(indices.len(), control_points.len())?;
        let n_vars = control_points.first().map_or(0, Vec::len);
        if n_vars == 0 {
            return Err(Error::precondition("control points must be non-empty vectors"));
        }
        for p in &control_points {
            Error::check_dim(n_vars, p.len())?;
        }
        let coefficients = coefficients_for(degree, &indices)?;
        Ok(BezierSimplex {
            n_objectives,
            degree,
            n_vars,
            indices,
            coefficients,
            control_points,
        })
    }

    pub fn n_objectives(&self) -> usize {
        self.n_objectives
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    pub fn control_points(&self) -> &[DecisionVector] {
        &self.control_points
    }

    pub fn control_point(&self, d: &MultiIndex) -> Option<&DecisionVector> {
        self.indices
            .iter()
            .position(|i| i == d)
            .map(|pos| &self.control_points[pos])
    }

    pub fn evaluate(&self, t: &SimplexParam) -> Result<DecisionVector> {
        Error::check_dim(self.n_objectives, t.dim())?;
        let terms = bernstein_terms(&self.indices, &self.coefficients, t.as_slice());
        let mut x = vec![0.0; self.n_vars];
        for (w, p) in terms.iter().zip(&self.control_points) {
            for (xi, pi) in x.iter_mut().zip(p) {
                *xi += w * pi;
            }
        }
        Ok(x)
    }

    /// Sum of squared distances between samples and the model.
    pub fn ols_loss(&self, samples: &[(SimplexParam, DecisionVector)]) -> Result<f64> {
        let mut loss = 0.0;
        for (t, x) in samples {
            let b = self.evaluate(t)?;
            Error::check_dim(self.n_vars, x.len())?;
            loss += b.iter().zip(x).map(|(a, c)| (a - c).powi(2)).sum::<f64>();
        }
        Ok(loss)
    }

    /// One line per control point: the multi-index entries then the
    /// coordinates, preceded by a `bezier_simplex M D N` header.
    pub fn to_text(&self) -> String {
        let mut s = format!(
            "bezier_simplex {} {} {}\n",
            self.n_objectives, self.degree, self.n_vars
        );
        for (d, p) in self.indices.iter().zip(&self.control_points) {
            let fields: Vec<String> = d
                .0
                .iter()
                .map(u32::to_string)
                .chain(p.iter().map(f64::to_string))
                .collect();
            let _ = writeln!(s, "{}", fields.join(" "));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let bad = |message: String| Error::Format {
            path: "<bezier model>".into(),
            message,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("empty input".into()))?;
        let mut head = header.split_whitespace();
        if head.next() != Some("bezier_simplex") {
            return Err(bad(format!("unexpected header `{header}`")));
        }
        let mut next_num = |name: &str| -> Result<usize> {
            head.next()
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| bad(format!("header is missing {name}")))
        };
        let m = next_num("M")?;
        let degree = next_num("D")? as u32;
        let n = next_num("N")?;
        let expected = enumerate_multi_indices(m, degree)?;
        let mut points = Vec::with_capacity(expected.len());
        for (line, want) in lines.zip(&expected) {
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != m + n {
                return Err(bad(format!("expected {} fields in `{line}`", m + n)));
            }
            let idx: Vec<u32> = fields[..m]
                .iter()
                .map(|f| f.parse().map_err(|_| bad(format!("bad index `{f}`"))))
                .collect::<Result<_>>()?;
            if &MultiIndex(idx) != want {
                return Err(bad(format!("control points out of order at `{line}`")));
            }
            let p: Vec<f64> = fields[m..]
                .iter()
                .map(|f| f.parse().map_err(|_| bad(format!("bad coordinate `{f}`"))))
                .collect::<Result<_>>()?;
            points.push(p);
        }
        if points.len() != expected.len() {
            return Err(bad(format!(
                "expected {} control points, found {}",
                expected.len(),
                points.len()
            )));
        }
        BezierSimplex::new(m, degree, points)
    }
}

/// Result of a least-squares fit.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub model: BezierSimplex,
    /// Numerical rank of the design matrix.
    pub rank: usize,
    /// Set when the design matrix lacked full column rank and the
    /// minimum-norm solution was returned.
    pub rank_deficient: bool,
}

/// Fit control points minimizing `Σ ‖x_k − b(t_k)‖²`.
///
/// Full-rank designs are solved through the normal equations; rank-deficient
/// ones fall back to the SVD minimum-norm solution and set `rank_deficient`.
pub fn fit_ols(
    samples: &[(SimplexParam, DecisionVector)],
    n_objectives: usize,
    degree: u32,
    n_vars: usize,
) -> Result<FitOutcome> {
    if samples.is_empty() {
        return Err(Error::precondition("cannot fit a Bézier simplex to zero samples"));
    }
    let indices = enumerate_multi_indices(n_objectives, degree)?;
    let coefficients = coefficients_for(degree, &indices)?;
    let n_terms = indices.len();
    let mut design = DMatrix::<f64>::zeros(samples.len(), n_terms);
    let mut targets = DMatrix::<f64>::zeros(samples.len(), n_vars);
    for (row, (t, x)) in samples.iter().enumerate() {
        Error::check_dim(n_objectives, t.dim())?;
        Error::check_dim(n_vars, x.len())?;
        for (col, v) in bernstein_terms(&indices, &coefficients, t.as_slice())
            .into_iter()
            .enumerate()
        {
            design[(row, col)] = v;
        }
        for (col, &v) in x.iter().enumerate() {
            targets[(row, col)] = v;
        }
    }

    let svd = design.clone().svd(true, true);
    let sigma_max = svd.singular_values.max();
    let tol = sigma_max * 1e-10;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();

    let solution = if rank == n_terms {
        let gram = design.transpose() * &design;
        let rhs = design.transpose() * &targets;
        match gram.cholesky() {
            Some(chol) => chol.solve(&rhs),
            None => svd
                .solve(&targets, tol)
                .map_err(|e| Error::precondition(format!("least-squares solve failed: {e}")))?,
        }
    } else {
        log::warn!(
            "Bézier fit is rank deficient (rank {rank} < {n_terms} terms); using minimum-norm solution"
        );
        svd.solve(&targets, tol)
            .map_err(|e| Error::precondition(format!("least-squares solve failed: {e}")))?
    };

    let control_points = (0..n_terms)
        .map(|j| solution.row(j).iter().copied().collect())
        .collect();
    Ok(FitOutcome {
        model: BezierSimplex::new(n_objectives, degree, control_points)?,
        rank,
        rank_deficient: rank < n_terms,
    })
}

/// Equally spaced parameters on the simplex.
///
/// For `M = 2` this generates `count + 2` equally spaced points on `Δ^1`,
/// with the first coordinate ascending, and removes the two vertices when
/// `drop_extremes` is set. For `M > 2` a simplex-lattice design `{d / n}` is
/// used at the smallest resolution `n` with enough points; if the lattice
/// holds more points than requested, the ones nearest the centroid are kept.
pub fn simplex_grid(m: usize, count: usize, drop_extremes: bool) -> Result<Vec<SimplexParam>> {
    if m < 2 {
        return Err(Error::precondition("simplex grid needs M >= 2"));
    }
    if count == 0 && drop_extremes {
        return Ok(Vec::new());
    }
    if m == 2 {
        let n = (count + 1) as f64;
        let range = if drop_extremes { 1..=count } else { 0..=count + 1 };
        return Ok(range
            .map(|i| SimplexParam(vec![i as f64 / n, (count + 1 - i) as f64 / n]))
            .collect());
    }

    let mut resolution = 1u32;
    while num_multi_indices(m, resolution) < count + m {
        resolution += 1;
    }
    let lattice: Vec<SimplexParam> = enumerate_multi_indices(m, resolution)?
        .into_iter()
        .map(|d| SimplexParam(d.0.iter().map(|&v| v as f64 / resolution as f64).collect()))
        .collect();
    let (vertices, interior): (Vec<_>, Vec<_>) = lattice
        .into_iter()
        .partition(|t| t.as_slice().iter().any(|&v| v == 1.0));
    let order = center_outward_order(&interior);
    let mut keep: Vec<usize> = order.into_iter().take(count).collect();
    keep.sort_unstable();
    let chosen = keep.into_iter().map(|i| interior[i].clone());
    if drop_extremes {
        Ok(chosen.collect())
    } else {
        Ok(vertices.into_iter().chain(chosen).collect())
    }
}

/// Indices of `params` sorted by distance to the simplex centroid, nearest
/// first; ties keep their original order.
pub fn center_outward_order(params: &[SimplexParam]) -> Vec<usize> {
    let dist = |t: &SimplexParam| {
        let c = 1.0 / t.dim() as f64;
        t.as_slice().iter().map(|v| (v - c).powi(2)).sum::<f64>()
    };
    let mut order: Vec<usize> = (0..params.len()).collect();
    order.sort_by(|&a, &b| dist(&params[a]).total_cmp(&dist(&params[b])));
    order
}

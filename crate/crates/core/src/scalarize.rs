//! Weighted-sum scalarization and objective normalization.

use crate::bezier::{enumerate_multi_indices, SimplexParam};
use crate::{Error, ObjectiveVector, Result};

const DEGENERATE_RANGE: f64 = 1e-12;

/// A weight vector on the standard simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(SimplexParam);

impl WeightVector {
    pub fn new(w: Vec<f64>) -> Result<Self> {
        SimplexParam::new(w).map(WeightVector)
    }

    pub fn as_slice(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    /// True for the unit vectors `e_m`.
    pub fn is_extreme(&self) -> bool {
        self.as_slice().iter().any(|&v| v == 1.0)
    }

    /// The same vector seen as a Bézier simplex parameter.
    pub fn as_param(&self) -> &SimplexParam {
        &self.0
    }
}

/// `K` weights on `Δ^{M-1}` including every unit vector.
///
/// For two objectives the weights are equally spaced with the first component
/// descending: `(1,0), ..., (0,1)`. For more objectives the unit vectors come
/// first (by objective index), followed by the `K - M` non-vertex points of
/// the coarsest simplex lattice that has enough of them, nearest the centroid
/// first.
pub fn weight_set(k: usize, m: usize) -> Result<Vec<WeightVector>> {
    if m < 2 {
        return Err(Error::precondition("weight sets need at least two objectives"));
    }
    if k < m {
        return Err(Error::precondition(format!(
            "K = {k} cannot include all {m} extreme weight vectors"
        )));
    }
    if m == 2 {
        let steps = (k - 1) as f64;
        return (0..k)
            .map(|i| WeightVector::new(vec![(k - 1 - i) as f64 / steps, i as f64 / steps]))
            .collect();
    }

    let mut out: Vec<WeightVector> = (0..m)
        .map(|i| WeightVector(SimplexParam::vertex(m, i)))
        .collect();
    let extra = k - m;
    if extra > 0 {
        let mut resolution = 2u32;
        loop {
            let lattice = enumerate_multi_indices(m, resolution)?;
            let interior: Vec<Vec<f64>> = lattice
                .iter()
                .filter(|d| d.0.iter().all(|&v| v < resolution))
                .map(|d| d.0.iter().map(|&v| v as f64 / resolution as f64).collect())
                .collect();
            if interior.len() >= extra {
                let params: Vec<SimplexParam> = interior
                    .into_iter()
                    .map(SimplexParam::new)
                    .collect::<Result<_>>()?;
                for i in crate::bezier::center_outward_order(&params).into_iter().take(extra) {
                    out.push(WeightVector(params[i].clone()));
                }
                break;
            }
            resolution += 1;
        }
    }
    Ok(out)
}

/// A scalarizing function `g_w(f)`.
pub trait Scalarizer {
    fn scalarize(&self, w: &WeightVector, f: &[f64]) -> Result<f64>;
}

/// `g(w, f) = Σ w_m f_m`.
#[derive(Debug, Clone, Copy, Default)]
pub struct WeightedSum;

impl Scalarizer for WeightedSum {
    fn scalarize(&self, w: &WeightVector, f: &[f64]) -> Result<f64> {
        weighted_sum(w, f)
    }
}

pub fn weighted_sum(w: &WeightVector, f: &[f64]) -> Result<f64> {
    Error::check_dim(w.dim(), f.len())?;
    Ok(w.as_slice().iter().zip(f).map(|(a, b)| a * b).sum())
}

/// Approximate ideal and nadir points used for normalization.
#[derive(Debug, Clone, PartialEq)]
pub struct RefPoints {
    pub ideal: ObjectiveVector,
    pub nadir: ObjectiveVector,
}

impl RefPoints {
    pub fn new(ideal: ObjectiveVector, nadir: ObjectiveVector) -> Result<Self> {
        Error::check_dim(ideal.len(), nadir.len())?;
        if ideal.iter().zip(&nadir).any(|(lo, hi)| lo > hi) {
            return Err(Error::precondition("ideal point must not exceed nadir point"));
        }
        Ok(RefPoints { ideal, nadir })
    }

    /// Component-wise min (ideal) and max (nadir) over a set of objective vectors.
    pub fn from_objectives<'a, I>(points: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a [f64]>,
    {
        let mut iter = points.into_iter();
        let first = iter
            .next()
            .ok_or_else(|| Error::precondition("cannot derive reference points from nothing"))?;
        let mut ideal = first.to_vec();
        let mut nadir = first.to_vec();
        for f in iter {
            Error::check_dim(ideal.len(), f.len())?;
            for (m, &v) in f.iter().enumerate() {
                ideal[m] = ideal[m].min(v);
                nadir[m] = nadir[m].max(v);
            }
        }
        Ok(RefPoints { ideal, nadir })
    }

    pub fn dim(&self) -> usize {
        self.ideal.len()
    }

    /// `(f − ideal) / (nadir − ideal)`; ranges under 1e-12 divide by 1.
    pub fn normalize(&self, f: &[f64]) -> Result<ObjectiveVector> {
        Error::check_dim(self.dim(), f.len())?;
        Ok(f.iter()
            .zip(self.ideal.iter().zip(&self.nadir))
            .map(|(&v, (&lo, &hi))| {
                let range = hi - lo;
                let range = if range < DEGENERATE_RANGE { 1.0 } else { range };
                (v - lo) / range
            })
            .collect())
    }

    /// Weighted sum of the normalized objective vector.
    pub fn normalized_weighted_sum(&self, w: &WeightVector, f: &[f64]) -> Result<f64> {
        weighted_sum(w, &self.normalize(f)?)
    }
}

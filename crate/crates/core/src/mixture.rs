//! Weighted Dirac mixtures (point sets) and seeded test-data generators.
//!
//! A [`DiracMixture`] stores `count` locations of dimension `dim` in row-major
//! order together with strictly positive weights that sum to one. Both the
//! original mixture (M components) and its reduction (L components) use this
//! type.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::seeded;

/// Largest deviation of the weight sum from one that is silently renormalized
/// by [`DiracMixture::new_normalized`].
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiracMixture {
    dim: usize,
    locations: Vec<f64>,
    weights: Vec<f64>,
}

impl DiracMixture {
    /// Validates rows and weights and renormalizes the weights to sum to one.
    ///
    /// Any positive weights are accepted, so `[1, 1]` becomes `[0.5, 0.5]`.
    pub fn new(rows: &[Vec<f64>], weights: &[f64]) -> Result<Self> {
        let first = rows.first().ok_or(Error::Empty)?;
        let dim = first.len();
        let mut flat = Vec::with_capacity(rows.len() * dim);
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(dim, flat, weights.to_vec())
    }

    /// Same as [`DiracMixture::new`] over row-major storage.
    pub fn from_flat(dim: usize, locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let mut m = Self::checked(dim, locations, weights)?;
        let sum: f64 = m.weights.iter().sum();
        // Already-normalized weights are kept bitwise so validation is idempotent.
        if (sum - 1.0).abs() > 4.0 * f64::EPSILON * m.weights.len() as f64 {
            m.weights.iter_mut().for_each(|w| *w /= sum);
        }
        Ok(m)
    }

    /// Like [`DiracMixture::from_flat`] but rejects weights whose sum deviates
    /// from one by more than [`WEIGHT_SUM_TOLERANCE`].
    pub fn new_normalized(dim: usize, locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            // Report the positivity/finiteness problem first if there is one.
            Self::checked(dim, locations, weights)?;
            return Err(Error::WeightSum {
                sum,
                tolerance: WEIGHT_SUM_TOLERANCE,
            });
        }
        Self::from_flat(dim, locations, weights)
    }

    /// Mixture with weight `1/count` on every location.
    pub fn equal_weights(rows: &[Vec<f64>]) -> Result<Self> {
        let w = vec![1.0; rows.len()];
        Self::new(rows, &w)
    }

    pub fn equal_weights_flat(dim: usize, locations: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let n = locations.len() / dim;
        Self::from_flat(dim, locations, vec![1.0; n])
    }

    fn checked(dim: usize, locations: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        if locations.len() != weights.len() * dim {
            return Err(Error::DimensionMismatch {
                expected: weights.len() * dim,
                found: locations.len(),
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !w.is_finite() {
                return Err(Error::NonFinite { index: i });
            }
            if w <= 0.0 {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    weight: w,
                });
            }
        }
        if let Some(pos) = locations.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index: pos / dim });
        }
        Ok(Self {
            dim,
            locations,
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false for a validated mixture.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.locations[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.locations.chunks_exact(self.dim)
    }

    /// Row-major `count × dim` coordinates.
    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.points().map(<[f64]>::to_vec).collect()
    }

    /// Weighted mean per dimension, `Σ_i w_i x_i`.
    pub fn mean(&self) -> Vec<f64> {
        weighted_mean(self.dim, &self.locations, &self.weights)
    }

    /// Weighted covariance (row-major `dim × dim`) about the weighted mean.
    pub fn covariance(&self) -> Vec<f64> {
        let mean = self.mean();
        let d = self.dim;
        let mut cov = vec![0.0; d * d];
        for (p, &w) in self.points().zip(&self.weights) {
            for a in 0..d {
                let da = p[a] - mean[a];
                for b in 0..d {
                    cov[a * d + b] += w * da * (p[b] - mean[b]);
                }
            }
        }
        cov
    }

    /// Per-axis `(min, max)` over all locations.
    pub fn bounds(&self) -> Vec<(f64, f64)> {
        let mut b = vec![(f64::INFINITY, f64::NEG_INFINITY); self.dim];
        for p in self.points() {
            for (k, &v) in p.iter().enumerate() {
                b[k].0 = b[k].0.min(v);
                b[k].1 = b[k].1.max(v);
            }
        }
        b
    }

    /// Largest per-axis extent `max - min`.
    pub fn spread(&self) -> f64 {
        self.bounds()
            .iter()
            .map(|(lo, hi)| hi - lo)
            .fold(0.0, f64::max)
    }

    /// Replaces the location of component `index`, keeping its weight.
    pub fn corrupt_with_outlier(&self, index: usize, location: &[f64]) -> Result<Self> {
        if index >= self.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: self.len(),
            });
        }
        if location.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: location.len(),
            });
        }
        let mut locations = self.locations.clone();
        locations[index * self.dim..(index + 1) * self.dim].copy_from_slice(location);
        Self::from_flat(self.dim, locations, self.weights.clone())
    }

    /// Drops every component whose `axis` coordinate lies in one of the closed
    /// `intervals`, then renormalizes the remaining weights.
    pub fn remove_stripes(&self, axis: usize, intervals: &[(f64, f64)]) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::invalid(format!(
                "axis {axis} out of range for dimension {}",
                self.dim
            )));
        }
        let mut sorted = intervals.to_vec();
        for &(lo, hi) in &sorted {
            if !(lo <= hi) {
                return Err(Error::invalid(format!("invalid interval [{lo}, {hi}]")));
            }
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        if sorted.windows(2).any(|w| w[1].0 <= w[0].1) {
            return Err(Error::invalid("stripe intervals overlap"));
        }
        let mut locations = Vec::with_capacity(self.locations.len());
        let mut weights = Vec::with_capacity(self.len());
        for (p, &w) in self.points().zip(&self.weights) {
            let v = p[axis];
            if !sorted.iter().any(|&(lo, hi)| v >= lo && v <= hi) {
                locations.extend_from_slice(p);
                weights.push(w);
            }
        }
        if weights.is_empty() {
            return Err(Error::AllPointsRemoved);
        }
        Self::from_flat(self.dim, locations, weights)
    }
}

pub(crate) fn weighted_mean(dim: usize, locations: &[f64], weights: &[f64]) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for (p, &w) in locations.chunks_exact(dim).zip(weights) {
        for (m, &v) in mean.iter_mut().zip(p) {
            *m += w * v;
        }
    }
    mean
}

/// One component of a diagonal-covariance Gaussian mixture.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianComponent {
    pub mean: Vec<f64>,
    /// Diagonal of the covariance matrix (variances).
    pub variance: Vec<f64>,
    pub mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianMixtureSpec {
    pub components: Vec<GaussianComponent>,
}

impl GaussianMixtureSpec {
    pub fn new(components: Vec<GaussianComponent>) -> Result<Self> {
        let spec = Self { components };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        let first = self.components.first().ok_or(Error::Empty)?;
        let dim = first.mean.len();
        if dim == 0 {
            return Err(Error::invalid("dimension must be at least 1"));
        }
        let mut total = 0.0;
        for (i, c) in self.components.iter().enumerate() {
            if c.mean.len() != dim || c.variance.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: if c.mean.len() != dim {
                        c.mean.len()
                    } else {
                        c.variance.len()
                    },
                });
            }
            if !(c.mass > 0.0 && c.mass <= 1.0) {
                return Err(Error::NonPositiveWeight {
                    index: i,
                    weight: c.mass,
                });
            }
            if c.variance.iter().any(|&v| !(v > 0.0 && v.is_finite()))
                || c.mean.iter().any(|v| !v.is_finite())
            {
                return Err(Error::invalid(format!(
                    "component {i} needs finite mean and positive variances"
                )));
            }
            total += c.mass;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::WeightSum {
                sum: total,
                tolerance: 1e-12,
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.components[0].mean.len()
    }

    pub fn means(&self) -> Vec<Vec<f64>> {
        self.components.iter().map(|c| c.mean.clone()).collect()
    }

    /// Per-component sample counts for `n` draws by largest-remainder rounding
    /// of `n * mass`; equal remainders go to the lower index.
    pub fn component_counts(&self, n: usize) -> Vec<usize> {
        let exact: Vec<f64> = self.components.iter().map(|c| c.mass * n as f64).collect();
        let mut counts: Vec<usize> = exact.iter().map(|e| e.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| {
            let ra = exact[a] - exact[a].floor();
            let rb = exact[b] - exact[b].floor();
            rb.total_cmp(&ra).then(a.cmp(&b))
        });
        for &i in order.iter().take(n.saturating_sub(assigned)) {
            counts[i] += 1;
        }
        counts
    }
}

/// `n` equally weighted draws from the `dim`-variate standard normal.
pub fn sample_standard_normal(n: usize, dim: usize, seed: u64) -> Result<DiracMixture> {
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    if dim == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let mut rng = seeded(seed);
    let locations: Vec<f64> = (0..n * dim).map(|_| rng.sample(StandardNormal)).collect();
    DiracMixture::equal_weights_flat(dim, locations)
}

/// Equally weighted samples of a Gaussian mixture with deterministic
/// per-component counts (see [`GaussianMixtureSpec::component_counts`]).
/// Samples are grouped by component in spec order.
pub fn sample_gaussian_mixture(
    spec: &GaussianMixtureSpec,
    n: usize,
    seed: u64,
) -> Result<DiracMixture> {
    spec.validate()?;
    if n == 0 {
        return Err(Error::invalid("sample count must be at least 1"));
    }
    let dim = spec.dim();
    let mut rng = seeded(seed);
    let mut locations = Vec::with_capacity(n * dim);
    for (c, count) in spec.components.iter().zip(spec.component_counts(n)) {
        let sd: Vec<f64> = c.variance.iter().map(|v| v.sqrt()).collect();
        for _ in 0..count {
            for (mean, sd) in c.mean.iter().zip(&sd) {
                let z: f64 = rng.sample(StandardNormal);
                locations.push(mean + sd * z);
            }
        }
    }
    DiracMixture::equal_weights_flat(dim, locations)
}

//! Comparing a reduction with its original: marginal histograms, mode
//! allocation, moment deltas.

use serde::{Deserialize, Serialize};

use crate::distance::{distance_approx, squared_distance, DEFAULT_C_B};
use crate::error::{Error, Result};
use crate::mixture::DiracMixture;

pub const DEFAULT_BINS: usize = 20;
pub const DEFAULT_RANGE: (f64, f64) = (-4.0, 4.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    /// Normalized over the in-range mass.
    pub masses: Vec<f64>,
    /// Mass that fell outside `[edges[0], edges[last]]`.
    pub outside_mass: f64,
}

/// Weight mass per bin along `axis`. Bins are left-closed, the last one is
/// also right-closed.
pub fn marginal_histogram(
    m: &DiracMixture,
    axis: usize,
    bins: usize,
    range: (f64, f64),
) -> Result<Histogram> {
    if axis >= m.dim() {
        return Err(Error::invalid(format!(
            "axis {axis} out of range for dimension {}",
            m.dim()
        )));
    }
    if bins == 0 {
        return Err(Error::invalid("bins must be at least 1"));
    }
    let (lo, hi) = range;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::invalid(format!("empty histogram range [{lo}, {hi}]")));
    }
    let width = (hi - lo) / bins as f64;
    let edges: Vec<f64> = (0..=bins)
        .map(|i| if i == bins { hi } else { lo + i as f64 * width })
        .collect();
    let mut masses = vec![0.0; bins];
    let mut outside = 0.0;
    for (p, &w) in m.points().zip(m.weights()) {
        let v = p[axis];
        if v < lo || v > hi {
            outside += w;
            continue;
        }
        // Locate by edges so boundary points follow the left-closed rule.
        let mut bin = (((v - lo) / width) as usize).min(bins - 1);
        while bin > 0 && v < edges[bin] {
            bin -= 1;
        }
        while bin + 1 < bins && v >= edges[bin + 1] {
            bin += 1;
        }
        masses[bin] += w;
    }
    let inside: f64 = masses.iter().sum();
    if inside <= 0.0 {
        return Err(Error::EmptyHistogram);
    }
    masses.iter_mut().for_each(|v| *v /= inside);
    Ok(Histogram {
        edges,
        masses,
        outside_mass: outside,
    })
}

/// `Σ |a_i − b_i|` over histograms with identical edges.
pub fn hist_l1(a: &Histogram, b: &Histogram) -> Result<f64> {
    if a.edges != b.edges {
        return Err(Error::EdgeMismatch);
    }
    Ok(a.masses
        .iter()
        .zip(&b.masses)
        .map(|(x, y)| (x - y).abs())
        .sum())
}

/// Number of reduced components nearest to each mode center (lowest index on
/// ties).
pub fn mode_allocation(reduced: &DiracMixture, mode_centers: &[Vec<f64>]) -> Result<Vec<usize>> {
    if mode_centers.is_empty() {
        return Err(Error::invalid("at least one mode center is required"));
    }
    if let Some(bad) = mode_centers.iter().find(|c| c.len() != reduced.dim()) {
        return Err(Error::DimensionMismatch {
            expected: reduced.dim(),
            found: bad.len(),
        });
    }
    let mut counts = vec![0; mode_centers.len()];
    for p in reduced.points() {
        let mut best = 0;
        let mut best_d = f64::INFINITY;
        for (i, c) in mode_centers.iter().enumerate() {
            let d = squared_distance(p, c);
            if d < best_d {
                best = i;
                best_d = d;
            }
        }
        counts[best] += 1;
    }
    Ok(counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareOptions {
    pub bins: usize,
    pub range: (f64, f64),
    pub c_b: f64,
    pub mode_centers: Option<Vec<Vec<f64>>>,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            bins: DEFAULT_BINS,
            range: DEFAULT_RANGE,
            c_b: DEFAULT_C_B,
            mode_centers: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodReport {
    pub name: String,
    pub count: usize,
    pub mean_delta: Vec<f64>,
    pub covariance_delta_frobenius: f64,
    /// One entry per axis.
    pub hist_l1: Vec<f64>,
    pub mode_counts: Option<Vec<usize>>,
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub original_count: usize,
    pub dim: usize,
    pub bins: usize,
    pub range: (f64, f64),
    pub c_b: f64,
    pub methods: Vec<MethodReport>,
}

/// Metrics of each named reduction against `original`.
pub fn compare(
    original: &DiracMixture,
    methods: &[(String, DiracMixture)],
    opts: &CompareOptions,
) -> Result<CompareReport> {
    let dim = original.dim();
    let original_hists: Vec<Histogram> = (0..dim)
        .map(|k| marginal_histogram(original, k, opts.bins, opts.range))
        .collect::<Result<_>>()?;
    let original_mean = original.mean();
    let original_cov = original.covariance();
    let mut reports = Vec::with_capacity(methods.len());
    for (name, reduced) in methods {
        if reduced.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: reduced.dim(),
            });
        }
        let mean_delta = reduced
            .mean()
            .iter()
            .zip(&original_mean)
            .map(|(a, b)| a - b)
            .collect();
        let covariance_delta_frobenius = reduced
            .covariance()
            .iter()
            .zip(&original_cov)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        let mut l1 = Vec::with_capacity(dim);
        for (k, oh) in original_hists.iter().enumerate() {
            let h = match marginal_histogram(reduced, k, opts.bins, opts.range) {
                Ok(h) => h,
                // A reduction entirely out of range differs maximally.
                Err(Error::EmptyHistogram) => {
                    l1.push(2.0);
                    continue;
                }
                Err(e) => return Err(e),
            };
            l1.push(hist_l1(oh, &h)?);
        }
        let mode_counts = opts
            .mode_centers
            .as_ref()
            .map(|c| mode_allocation(reduced, c))
            .transpose()?;
        reports.push(MethodReport {
            name: name.clone(),
            count: reduced.len(),
            mean_delta,
            covariance_delta_frobenius,
            hist_l1: l1,
            mode_counts,
            distance: distance_approx(reduced, original, opts.c_b)?.total,
        });
    }
    Ok(CompareReport {
        original_count: original.len(),
        dim,
        bins: opts.bins,
        range: opts.range,
        c_b: opts.c_b,
        methods: reports,
    })
}

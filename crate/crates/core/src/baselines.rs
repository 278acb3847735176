//! Comparison reductions: weighted k-means (Lloyd) and random selection.

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::distance::squared_distance;
use crate::error::{Error, Result};
use crate::mixture::DiracMixture;
use crate::rng::{seeded, systematic_distinct};

pub const DEFAULT_KMEANS_ITERS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    /// Row-major `L × N`.
    pub centers: Vec<f64>,
    pub assignment: Vec<usize>,
    pub iterations: usize,
    pub converged: bool,
    /// Weighted within-cluster squared distance after each center update.
    pub objective_history: Vec<f64>,
}

fn nearest(p: &[f64], centers: &[f64], dim: usize) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, center) in centers.chunks_exact(dim).enumerate() {
        let d = squared_distance(p, center);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(m: &DiracMixture, centers: &[f64]) -> Vec<usize> {
    m.points().map(|p| nearest(p, centers, m.dim()).0).collect()
}

fn within_cluster(m: &DiracMixture, centers: &[f64], assignment: &[usize]) -> f64 {
    let dim = m.dim();
    m.points()
        .zip(m.weights())
        .zip(assignment)
        .map(|((p, w), &c)| w * squared_distance(p, &centers[c * dim..(c + 1) * dim]))
        .sum()
}

/// Weighted Lloyd iterations from `count` distinct, uniformly chosen input
/// points.
///
/// Points go to the nearest center (lowest index on ties) and centers move to
/// the weighted mean of their points. An empty cluster is re-seeded at the
/// point farthest from its current center. Iteration stops when assignments
/// no longer change or after `max_iters` updates.
pub fn kmeans(
    original: &DiracMixture,
    count: usize,
    seed: u64,
    max_iters: usize,
) -> Result<KMeansResult> {
    let n = original.len();
    if count > n {
        return Err(Error::TooManyComponents {
            requested: count,
            available: n,
        });
    }
    if count == 0 {
        return Err(Error::invalid("target count must be at least 1"));
    }
    let mut rng = seeded(seed);
    let mut picks = index::sample(&mut rng, n, count).into_vec();
    picks.sort_unstable();
    let mut centers: Vec<f64> = picks
        .iter()
        .flat_map(|&i| original.point(i).to_vec())
        .collect();

    let mut assignment = assign(original, &centers);
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iters {
        iterations += 1;
        update_centers(original, &mut centers, &assignment);
        history.push(within_cluster(original, &centers, &assignment));
        let next = assign(original, &centers);
        if next == assignment {
            converged = true;
            break;
        }
        assignment = next;
    }
    Ok(KMeansResult {
        centers,
        assignment,
        iterations,
        converged,
        objective_history: history,
    })
}

fn update_centers(m: &DiracMixture, centers: &mut [f64], assignment: &[usize]) {
    let dim = m.dim();
    let count = centers.len() / dim;
    let mut sums = vec![0.0; centers.len()];
    let mut mass = vec![0.0; count];
    for ((p, &w), &c) in m.points().zip(m.weights()).zip(assignment) {
        mass[c] += w;
        for k in 0..dim {
            sums[c * dim + k] += w * p[k];
        }
    }
    let mut residual: Vec<f64> = m
        .points()
        .zip(assignment)
        .map(|(p, &c)| squared_distance(p, &centers[c * dim..(c + 1) * dim]))
        .collect();
    for c in 0..count {
        if mass[c] > 0.0 {
            for k in 0..dim {
                centers[c * dim + k] = sums[c * dim + k] / mass[c];
            }
        } else {
            // Farthest point from its current center; lowest index on ties.
            let mut far = 0;
            for (i, &r) in residual.iter().enumerate() {
                if r > residual[far] {
                    far = i;
                }
            }
            centers[c * dim..(c + 1) * dim].copy_from_slice(m.point(far));
            residual[far] = 0.0;
        }
    }
}

/// k-means centers returned as an equally weighted mixture.
pub fn kmeans_reduce(
    original: &DiracMixture,
    count: usize,
    seed: u64,
    max_iters: usize,
) -> Result<DiracMixture> {
    let r = kmeans(original, count, seed, max_iters)?;
    DiracMixture::equal_weights_flat(original.dim(), r.centers)
}

/// `count` distinct components chosen by weighted systematic resampling,
/// returned with equal weights.
pub fn random_select(original: &DiracMixture, count: usize, seed: u64) -> Result<DiracMixture> {
    if count == 0 {
        return Err(Error::invalid("target count must be at least 1"));
    }
    let picks = systematic_distinct(original.weights(), count, &mut seeded(seed))?;
    let locs = picks
        .iter()
        .flat_map(|&i| original.point(i).to_vec())
        .collect();
    DiracMixture::equal_weights_flat(original.dim(), locs)
}

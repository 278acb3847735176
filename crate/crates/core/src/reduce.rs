//! Reduction of a Dirac mixture to `L` equally weighted components.
//!
//! The reduced locations minimize the large-width distance to the original.
//! The squared mean difference enters with the penalty constant `C_b`, which
//! keeps the problem unconstrained while driving the means together.
//! Optimization variables are the reduced locations flattened row-major.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distance::{half_power_pi, DistanceReport, PreparedOriginal, DEFAULT_C_B};
use crate::error::{Error, Result};
use crate::gradient::KappaMode;
use crate::mixture::DiracMixture;
use crate::optim::{bfgs_minimize, BfgsOptions, IterationRecord, Status};
use crate::rng::{seeded, systematic_distinct};

/// Relative size of the jitter applied to randomly selected start locations.
pub const INIT_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitStrategy {
    /// Weighted systematic selection of distinct original components.
    #[default]
    RandomSubset,
    /// Explicit start locations, one row per reduced component.
    Given(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReduceConfig {
    pub target_count: usize,
    pub c_b: f64,
    pub kappa: KappaMode,
    pub init: InitStrategy,
    pub seed: u64,
    pub max_iters: usize,
    /// Tolerance on the max-abs gradient entry divided by `π^{N/2}/2`.
    pub grad_tol: f64,
    pub step_tol: f64,
    pub multistart: usize,
}

impl Default for ReduceConfig {
    fn default() -> Self {
        Self {
            target_count: 10,
            c_b: DEFAULT_C_B,
            kappa: KappaMode::CbMinusOne,
            init: InitStrategy::RandomSubset,
            seed: 0,
            max_iters: 500,
            grad_tol: 1e-8,
            step_tol: 1e-12,
            multistart: 1,
        }
    }
}

impl ReduceConfig {
    pub fn new(target_count: usize) -> Self {
        Self {
            target_count,
            ..Self::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_c_b(mut self, c_b: f64) -> Self {
        self.c_b = c_b;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.target_count == 0 {
            return Err(Error::invalid("target count must be at least 1"));
        }
        if !(self.grad_tol > 0.0) || !(self.step_tol > 0.0) {
            return Err(Error::invalid("tolerances must be positive"));
        }
        if !self.c_b.is_finite() {
            return Err(Error::invalid("c_b must be finite"));
        }
        if self.multistart == 0 {
            return Err(Error::invalid("multistart must be at least 1"));
        }
        Ok(())
    }

    fn bfgs_options(&self) -> BfgsOptions {
        BfgsOptions {
            max_iters: self.max_iters,
            grad_tol: self.grad_tol,
            step_tol: self.step_tol,
            ..BfgsOptions::default()
        }
    }
}

/// Outcome of one reduction.
///
/// Record objectives are distances; record gradients are scaled by
/// `2/π^{N/2}` to match `grad_tol`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub final_report: DistanceReport,
    /// Index of the winning start when `multistart > 1`.
    pub start_index: usize,
    /// Final objective of every start.
    pub start_objectives: Vec<f64>,
}

impl OptimizationTrace {
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }
}

/// Start locations (row-major `L × N`) for a reduction.
pub fn init_locations(
    original: &DiracMixture,
    target_count: usize,
    strategy: &InitStrategy,
    seed: u64,
) -> Result<Vec<f64>> {
    let dim = original.dim();
    match strategy {
        InitStrategy::Given(rows) => {
            if rows.len() != target_count {
                return Err(Error::invalid(format!(
                    "given start has {} rows, expected {target_count}",
                    rows.len()
                )));
            }
            let mut flat = Vec::with_capacity(target_count * dim);
            for row in rows {
                if row.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: row.len(),
                    });
                }
                if row.iter().any(|v| !v.is_finite()) {
                    return Err(Error::invalid("given start locations must be finite"));
                }
                flat.extend_from_slice(row);
            }
            Ok(flat)
        }
        InitStrategy::RandomSubset => {
            let mut rng = seeded(seed);
            let picks = systematic_distinct(original.weights(), target_count, &mut rng)?;
            let spread: Vec<f64> = original.bounds().iter().map(|(lo, hi)| hi - lo).collect();
            let mut flat = Vec::with_capacity(target_count * dim);
            for &i in &picks {
                for (k, &v) in original.point(i).iter().enumerate() {
                    let jitter: f64 = rng.random_range(-1.0..=1.0);
                    flat.push(v + jitter * INIT_JITTER * spread[k]);
                }
            }
            Ok(flat)
        }
    }
}

/// Reduces `original` to `cfg.target_count` equally weighted components.
pub fn reduce(
    original: &DiracMixture,
    cfg: &ReduceConfig,
) -> Result<(DiracMixture, OptimizationTrace)> {
    cfg.validate()?;
    let prepared = PreparedOriginal::new(original);
    let starts = match cfg.init {
        InitStrategy::Given(_) => 1,
        InitStrategy::RandomSubset => cfg.multistart,
    };
    let mut best: Option<(Vec<f64>, OptimizationTrace)> = None;
    let mut start_objectives = Vec::with_capacity(starts);
    for start in 0..starts {
        let seed = cfg.seed.wrapping_add(start as u64);
        let x0 = init_locations(original, cfg.target_count, &cfg.init, seed)?;
        let (x, trace) = minimize_from(&prepared, x0, cfg)?;
        start_objectives.push(trace.final_report.total);
        let better = match &best {
            None => true,
            Some((_, b)) => trace.final_report.total < b.final_report.total,
        };
        if better {
            best = Some((
                x,
                OptimizationTrace {
                    start_index: start,
                    ..trace
                },
            ));
        }
    }
    let (x, mut trace) = best.expect("at least one start");
    trace.start_objectives = start_objectives;
    let reduced = DiracMixture::equal_weights_flat(original.dim(), x)?;
    Ok((reduced, trace))
}

fn minimize_from(
    prepared: &PreparedOriginal<'_>,
    x0: Vec<f64>,
    cfg: &ReduceConfig,
) -> Result<(Vec<f64>, OptimizationTrace)> {
    let dim = prepared.original().dim();
    let l = x0.len() / dim;
    let weights = vec![1.0 / l as f64; l];
    let scale = half_power_pi(dim) / 2.0;
    let kappa = cfg.kappa.kappa(cfg.c_b);

    let result = bfgs_minimize(
        |x: &[f64]| prepared.approx_parts(x, &weights, cfg.c_b).total / scale,
        |x: &[f64]| {
            let mut g = prepared.approx_gradient(x, &weights, kappa);
            g.iter_mut().for_each(|v| *v /= scale);
            g
        },
        x0,
        &cfg.bfgs_options(),
    )?;
    let mut records = result.records;
    records.iter_mut().for_each(|r| r.objective *= scale);
    let final_report = prepared.approx_parts(&result.x, &weights, cfg.c_b);
    Ok((
        result.x,
        OptimizationTrace {
            records,
            status: result.status,
            final_report,
            start_index: 0,
            start_objectives: Vec::new(),
        },
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchicalSummary {
    pub chunk_sizes: Vec<usize>,
    pub chunk_targets: Vec<usize>,
    pub chunk_status: Vec<Status>,
    pub pooled_count: usize,
    pub final_trace: OptimizationTrace,
}

/// Reduces chunk by chunk, pools the chunk reductions, and reduces the pool.
///
/// After a seeded shuffle the original is cut into contiguous chunks of at
/// most `batch_size` components. A chunk with mass `μ` is reduced to
/// `⌈L·μ⌉` components that share `μ` equally. With a single chunk this is
/// plain [`reduce`].
pub fn hierarchical_reduce(
    original: &DiracMixture,
    batch_size: usize,
    cfg: &ReduceConfig,
) -> Result<(DiracMixture, HierarchicalSummary)> {
    cfg.validate()?;
    let target = cfg.target_count;
    if batch_size < target {
        return Err(Error::invalid(format!(
            "batch size {batch_size} is smaller than the target count {target}"
        )));
    }
    if batch_size >= original.len() {
        let (reduced, trace) = reduce(original, cfg)?;
        return Ok((
            reduced,
            HierarchicalSummary {
                chunk_sizes: vec![original.len()],
                chunk_targets: vec![target],
                chunk_status: vec![trace.status],
                pooled_count: original.len(),
                final_trace: trace,
            },
        ));
    }

    let dim = original.dim();
    let mut order: Vec<usize> = (0..original.len()).collect();
    order.shuffle(&mut seeded(cfg.seed));

    let mut summary_sizes = Vec::new();
    let mut summary_targets = Vec::new();
    let mut summary_status = Vec::new();
    let mut pooled_locations = Vec::new();
    let mut pooled_weights = Vec::new();
    for (c, chunk) in order.chunks(batch_size).enumerate() {
        let mut locs = Vec::with_capacity(chunk.len() * dim);
        let mut w = Vec::with_capacity(chunk.len());
        for &i in chunk {
            locs.extend_from_slice(original.point(i));
            w.push(original.weights()[i]);
        }
        let mass: f64 = w.iter().sum();
        let sub = DiracMixture::from_flat(dim, locs, w)?;
        let chunk_target = ((target as f64 * mass).ceil() as usize).clamp(1, chunk.len());
        let chunk_cfg = ReduceConfig {
            target_count: chunk_target,
            init: InitStrategy::RandomSubset,
            seed: cfg.seed.wrapping_add(1 + c as u64),
            ..cfg.clone()
        };
        let (reduced, trace) = reduce(&sub, &chunk_cfg)
            .map_err(|e| e.in_stage(format!("chunk {c}")))?;
        pooled_locations.extend_from_slice(reduced.locations());
        pooled_weights.extend(std::iter::repeat_n(mass / chunk_target as f64, chunk_target));
        summary_sizes.push(chunk.len());
        summary_targets.push(chunk_target);
        summary_status.push(trace.status);
    }

    let pooled = DiracMixture::from_flat(dim, pooled_locations, pooled_weights)?;
    let final_cfg = ReduceConfig {
        init: InitStrategy::RandomSubset,
        ..cfg.clone()
    };
    let (reduced, final_trace) = reduce(&pooled, &final_cfg)?;
    Ok((
        reduced,
        HierarchicalSummary {
            chunk_sizes: summary_sizes,
            chunk_targets: summary_targets,
            chunk_status: summary_status,
            pooled_count: pooled.len(),
            final_trace,
        },
    ))
}

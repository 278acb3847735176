//! Modified Cramér–von Mises distance between two Dirac mixtures.
//!
//! The distance integrates the squared LCD difference over all kernel centers
//! and over widths `b ∈ (0, b_max]` with weighting `b^{1-N}`. Two closed forms
//! are provided:
//!
//! * [`distance_exact`] evaluates the pairwise `γ` double sums for a finite
//!   `b_max`.
//! * [`distance_approx`] is the large-`b_max` form. Its only dependence on
//!   `b_max` is the constant `C_b = ln(4 b_max²) - Γ` multiplying the squared
//!   mean difference, which acts as a penalty forcing equal means.
//!
//! All double sums run row-major with ascending indices so results are
//! bitwise reproducible.

mod oracle;

use serde::{Deserialize, Serialize};

pub use oracle::{distance_quadrature_oracle, OracleResolution};

use crate::error::{Error, Result};
use crate::lcd::special::{gamma_offset_core, xlog_nonneg};
pub use crate::lcd::DistanceConstant;
use crate::mixture::{weighted_mean, DiracMixture};

/// Default penalty constant for the large-width form.
pub const DEFAULT_C_B: f64 = 100.0;

/// Distance totals in `[-NEGATIVE_SLACK, 0)` are reported as zero.
pub const NEGATIVE_SLACK: f64 = 1e-9;

/// Distance value with its term breakdown.
///
/// For [`DistanceConstant::ApproxCb`] the terms are the raw `xlog` double sums
/// and `total = π^{N/2}/8·(d_y − 2·d_xy + d_x) + π^{N/2}/4·C_b·d_e`.
///
/// For [`DistanceConstant::ExactBmax`] the terms are the `γ` double sums with
/// `γ(0)` subtracted from every pair (the offsets cancel because both
/// mixtures carry unit mass), so `total = d_y − 2·d_xy + d_x`. `d_e` is the
/// squared mean difference in both modes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub total: f64,
    pub d_y: f64,
    pub d_xy: f64,
    pub d_x: f64,
    pub d_e: f64,
    pub constant: DistanceConstant,
}

impl DistanceReport {
    /// Recomputes the total from the reported terms.
    pub fn total_from_parts(&self, dim: usize) -> f64 {
        match self.constant {
            DistanceConstant::ApproxCb { c_b } => approx_total(dim, self.d_y, self.d_xy, self.d_x, self.d_e, c_b),
            DistanceConstant::ExactBmax { .. } => self.d_y - 2.0 * self.d_xy + self.d_x,
        }
    }
}

pub(crate) fn half_power_pi(dim: usize) -> f64 {
    std::f64::consts::PI.powf(dim as f64 / 2.0)
}

fn approx_total(dim: usize, d_y: f64, d_xy: f64, d_x: f64, d_e: f64, c_b: f64) -> f64 {
    let p = half_power_pi(dim);
    p / 8.0 * (d_y - 2.0 * d_xy + d_x) + p / 4.0 * c_b * d_e
}

pub(crate) fn check_dims(reduced: &DiracMixture, original: &DiracMixture) -> Result<()> {
    if reduced.dim() != original.dim() {
        return Err(Error::DimensionMismatch {
            expected: original.dim(),
            found: reduced.dim(),
        });
    }
    Ok(())
}

#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// `Σ_i Σ_j a_i b_j f(‖a_i − b_j‖²)` in row-major order.
fn cross_sum(
    dim: usize,
    a: &[f64],
    wa: &[f64],
    b: &[f64],
    wb: &[f64],
    f: impl Fn(f64) -> f64,
) -> f64 {
    let mut total = 0.0;
    for (p, &w) in a.chunks_exact(dim).zip(wa) {
        let mut row = 0.0;
        for (q, &v) in b.chunks_exact(dim).zip(wb) {
            row += v * f(squared_distance(p, q));
        }
        total += w * row;
    }
    total
}

/// `Σ_i Σ_j w_i w_j f(‖a_i − a_j‖²)` for a pair function with `f(0) = 0`,
/// using the symmetry of the summand.
fn self_sum(dim: usize, a: &[f64], wa: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = wa.len();
    let mut total = 0.0;
    for i in 0..n {
        let p = &a[i * dim..(i + 1) * dim];
        let mut row = 0.0;
        for j in (i + 1)..n {
            row += wa[j] * f(squared_distance(p, &a[j * dim..(j + 1) * dim]));
        }
        total += wa[i] * row;
    }
    2.0 * total
}

/// The distance is nonnegative; roundoff within [`NEGATIVE_SLACK`] below
/// zero is reported as zero.
fn clamp_roundoff(total: f64) -> f64 {
    if (-NEGATIVE_SLACK..0.0).contains(&total) {
        0.0
    } else {
        total
    }
}

fn squared_mean_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Exact distance for kernel widths up to `b_max`.
pub fn distance_exact(
    reduced: &DiracMixture,
    original: &DiracMixture,
    b_max: f64,
) -> Result<DistanceReport> {
    check_dims(reduced, original)?;
    if !(b_max > 0.0) || !b_max.is_finite() {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    let dim = original.dim();
    let scale = half_power_pi(dim) / 8.0;
    let pair = |z: f64| gamma_offset_core(z, b_max);
    let (y, wy) = (original.locations(), original.weights());
    let (x, wx) = (reduced.locations(), reduced.weights());

    let d_y = scale * self_sum(dim, y, wy, pair);
    let d_xy = scale * cross_sum(dim, x, wx, y, wy, pair);
    let d_x = scale * self_sum(dim, x, wx, pair);
    Ok(DistanceReport {
        total: clamp_roundoff(d_y - 2.0 * d_xy + d_x),
        d_y,
        d_xy,
        d_x,
        d_e: squared_mean_difference(&reduced.mean(), &original.mean()),
        constant: DistanceConstant::ExactBmax { b_max },
    })
}

/// Large-`b_max` distance with penalty constant `c_b`.
pub fn distance_approx(
    reduced: &DiracMixture,
    original: &DiracMixture,
    c_b: f64,
) -> Result<DistanceReport> {
    check_dims(reduced, original)?;
    PreparedOriginal::new(original).approx_report(reduced, c_b)
}

/// An original mixture with its reduction-independent terms cached.
///
/// `D_y` costs `O(M²)` and the mean `O(M)`; caching them leaves
/// `O((M·L + L²)·N)` work per distance or gradient evaluation.
#[derive(Debug, Clone)]
pub struct PreparedOriginal<'a> {
    original: &'a DiracMixture,
    d_y: f64,
    mean: Vec<f64>,
}

impl<'a> PreparedOriginal<'a> {
    pub fn new(original: &'a DiracMixture) -> Self {
        let d_y = self_sum(
            original.dim(),
            original.locations(),
            original.weights(),
            xlog_nonneg,
        );
        Self {
            original,
            d_y,
            mean: original.mean(),
        }
    }

    pub fn original(&self) -> &'a DiracMixture {
        self.original
    }

    pub fn d_y(&self) -> f64 {
        self.d_y
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn approx_report(&self, reduced: &DiracMixture, c_b: f64) -> Result<DistanceReport> {
        check_dims(reduced, self.original)?;
        Ok(self.approx_parts(reduced.locations(), reduced.weights(), c_b))
    }

    pub(crate) fn approx_parts(&self, x: &[f64], wx: &[f64], c_b: f64) -> DistanceReport {
        let dim = self.original.dim();
        let d_xy = cross_sum(
            dim,
            x,
            wx,
            self.original.locations(),
            self.original.weights(),
            xlog_nonneg,
        );
        let d_x = self_sum(dim, x, wx, xlog_nonneg);
        let d_e = squared_mean_difference(&weighted_mean(dim, x, wx), &self.mean);
        DistanceReport {
            total: clamp_roundoff(approx_total(dim, self.d_y, d_xy, d_x, d_e, c_b)),
            d_y: self.d_y,
            d_xy,
            d_x,
            d_e,
            constant: DistanceConstant::ApproxCb { c_b },
        }
    }
}

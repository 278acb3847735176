//! Localized cumulative distributions with separable Gaussian kernels.
//!
//! The LCD of a density maps a kernel center `m` and width `b` to the
//! kernel-weighted probability mass around `m`. For a Dirac mixture it is the
//! weighted sum of kernel values at the component locations.

pub mod special;

use serde::{Deserialize, Serialize};

pub use special::{ei_neg, gamma_fn, xlog, EULER_GAMMA};

use crate::error::{Error, Result};
use crate::mixture::DiracMixture;

/// Kernel center and width.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelQuery {
    center: Vec<f64>,
    width: f64,
}

impl KernelQuery {
    pub fn new(center: Vec<f64>, width: f64) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::invalid(format!(
                "kernel width must be positive, got {width}"
            )));
        }
        if center.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("kernel center must be finite"));
        }
        Ok(Self { center, width })
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn width(&self) -> f64 {
        self.width
    }
}

/// The constant that carries the dependence on the largest kernel width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum DistanceConstant {
    /// Exact distance with kernel widths integrated over `(0, b_max]`.
    ExactBmax { b_max: f64 },
    /// Large-width form; `c_b = ln(4 b_max²) - Γ`.
    ApproxCb { c_b: f64 },
}

impl DistanceConstant {
    pub fn c_b_from_b_max(b_max: f64) -> f64 {
        (4.0 * b_max * b_max).ln() - EULER_GAMMA
    }
}

/// `Π_k exp(-(x_k - m_k)² / (2b²))`.
pub fn gaussian_kernel(x: &[f64], q: &KernelQuery) -> Result<f64> {
    if x.len() != q.center.len() {
        return Err(Error::DimensionMismatch {
            expected: q.center.len(),
            found: x.len(),
        });
    }
    Ok(kernel_unchecked(x, &q.center, q.width))
}

#[inline]
fn kernel_unchecked(x: &[f64], m: &[f64], b: f64) -> f64 {
    let sq: f64 = x.iter().zip(m).map(|(a, c)| (a - c) * (a - c)).sum();
    (-0.5 * sq / (b * b)).exp()
}

/// LCD of a Dirac mixture at one kernel.
pub fn lcd_eval(m: &DiracMixture, q: &KernelQuery) -> Result<f64> {
    if m.dim() != q.center.len() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            found: q.center.len(),
        });
    }
    Ok(m.points()
        .zip(m.weights())
        .map(|(p, &w)| w * kernel_unchecked(p, &q.center, q.width))
        .sum())
}

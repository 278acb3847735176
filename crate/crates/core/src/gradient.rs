//! Gradients of the distance with respect to the reduced locations.
//!
//! Both forms share the structure
//!
//! `∂D/∂x_ξη = π^{N/2}/2 · w_ξ · { Σ_i w^x_i (x_ξη − x_iη) φ(‖x_ξ − x_i‖²)
//!                               − Σ_i w^y_i (x_ξη − y_iη) φ(‖x_ξ − y_i‖²) + … }`
//!
//! with `φ(z) = Ei(−z/(4 b_max²))` for the exact distance and `φ(z) = ln z`
//! plus a mean-difference term for the large-width form. A pair at zero
//! distance contributes nothing: the difference factor vanishes and
//! `r·ln r² → 0`.

use serde::{Deserialize, Serialize};

use crate::distance::{check_dims, half_power_pi, squared_distance, PreparedOriginal};
use crate::error::{Error, Result};
use crate::lcd::special::e1;
use crate::mixture::{weighted_mean, DiracMixture};

/// `L × N` matrix of partial derivatives, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientMatrix {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
}

impl GradientMatrix {
    pub fn from_flat(rows: usize, dim: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != rows * dim {
            return Err(Error::DimensionMismatch {
                expected: rows * dim,
                found: values.len(),
            });
        }
        Ok(Self { rows, dim, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, axis: usize) -> f64 {
        self.values[row * self.dim + axis]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Coefficient of the mean-difference term in the large-width gradient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KappaMode {
    /// `κ = C_b − 1`: the exact derivative of the large-width distance.
    #[default]
    CbMinusOne,
    /// `κ = C_b`: approximating `Ei` inside the exact gradient instead.
    Cb,
}

impl KappaMode {
    pub fn kappa(self, c_b: f64) -> f64 {
        match self {
            KappaMode::CbMinusOne => c_b - 1.0,
            KappaMode::Cb => c_b,
        }
    }
}

/// `Σ_i w_i (x_ξ − p_i) φ(‖x_ξ − p_i‖²)` added into `out` (length `dim`),
/// scaled by `sign`.
#[inline]
fn accumulate_pairs(
    xi: &[f64],
    pts: &[f64],
    w: &[f64],
    sign: f64,
    phi: &impl Fn(f64) -> f64,
    out: &mut [f64],
) {
    let dim = xi.len();
    for (p, &wi) in pts.chunks_exact(dim).zip(w) {
        let z = squared_distance(xi, p);
        if z == 0.0 {
            continue;
        }
        let f = sign * wi * phi(z);
        for k in 0..dim {
            out[k] += f * (xi[k] - p[k]);
        }
    }
}

/// `Σ_i w^x_i (x_ξ − x_i) φ − Σ_i w^y_i (x_ξ − y_i) φ` per row, unscaled.
fn pair_terms(
    dim: usize,
    x: &[f64],
    wx: &[f64],
    y: &[f64],
    wy: &[f64],
    phi: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let mut out = vec![0.0; x.len()];
    for (xi, row) in x.chunks_exact(dim).zip(out.chunks_exact_mut(dim)) {
        accumulate_pairs(xi, x, wx, 1.0, &phi, row);
        accumulate_pairs(xi, y, wy, -1.0, &phi, row);
    }
    out
}

/// Gradient of [`crate::distance::distance_exact`].
pub fn grad_exact(
    reduced: &DiracMixture,
    original: &DiracMixture,
    b_max: f64,
) -> Result<GradientMatrix> {
    check_dims(reduced, original)?;
    if !(b_max > 0.0) || !b_max.is_finite() {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    let dim = reduced.dim();
    let four_b2 = 4.0 * b_max * b_max;
    let mut values = pair_terms(
        dim,
        reduced.locations(),
        reduced.weights(),
        original.locations(),
        original.weights(),
        |z| -e1(z / four_b2),
    );
    scale_rows(&mut values, dim, reduced.weights(), half_power_pi(dim) / 2.0);
    GradientMatrix::from_flat(reduced.len(), dim, values)
}

/// Gradient of [`crate::distance::distance_approx`] with the mean term
/// coefficient chosen by `kappa`.
pub fn grad_approx(
    reduced: &DiracMixture,
    original: &DiracMixture,
    c_b: f64,
    kappa: KappaMode,
) -> Result<GradientMatrix> {
    check_dims(reduced, original)?;
    let values = approx_gradient_flat(
        reduced.dim(),
        reduced.locations(),
        reduced.weights(),
        original.locations(),
        original.weights(),
        &original.mean(),
        kappa.kappa(c_b),
    );
    GradientMatrix::from_flat(reduced.len(), reduced.dim(), values)
}

impl PreparedOriginal<'_> {
    /// Large-width gradient for reduced locations `x` with weights `wx`.
    pub(crate) fn approx_gradient(&self, x: &[f64], wx: &[f64], kappa: f64) -> Vec<f64> {
        let o = self.original();
        approx_gradient_flat(o.dim(), x, wx, o.locations(), o.weights(), self.mean(), kappa)
    }
}

fn approx_gradient_flat(
    dim: usize,
    x: &[f64],
    wx: &[f64],
    y: &[f64],
    wy: &[f64],
    mean_y: &[f64],
    kappa: f64,
) -> Vec<f64> {
    let mut values = pair_terms(dim, x, wx, y, wy, f64::ln);
    let mean_x = weighted_mean(dim, x, wx);
    for row in values.chunks_exact_mut(dim) {
        for k in 0..dim {
            row[k] += kappa * (mean_x[k] - mean_y[k]);
        }
    }
    scale_rows(&mut values, dim, wx, half_power_pi(dim) / 2.0);
    values
}

fn scale_rows(values: &mut [f64], dim: usize, w: &[f64], factor: f64) {
    for (row, &wi) in values.chunks_exact_mut(dim).zip(w) {
        row.iter_mut().for_each(|v| *v *= factor * wi);
    }
}

/// Residual of the necessary optimality conditions for equal means:
/// `Σ_i w^y_i (x_ξ − y_i) ln‖x_ξ − y_i‖² − Σ_i w^x_i (x_ξ − x_i) ln‖x_ξ − x_i‖²`.
pub fn stationarity_residual(
    reduced: &DiracMixture,
    original: &DiracMixture,
) -> Result<GradientMatrix> {
    check_dims(reduced, original)?;
    let mut values = pair_terms(
        reduced.dim(),
        reduced.locations(),
        reduced.weights(),
        original.locations(),
        original.weights(),
        f64::ln,
    );
    values.iter_mut().for_each(|v| *v = -*v);
    GradientMatrix::from_flat(reduced.len(), reduced.dim(), values)
}

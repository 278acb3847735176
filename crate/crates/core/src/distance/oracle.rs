//! Brute-force quadrature of the defining distance integral.
//!
//! `D = ∫_0^{b_max} b^{1-N} ∫_{R^N} (F̃(m, b) − F(m, b))² dm db`
//!
//! evaluated without any of the closed-form simplifications, for validating
//! the closed forms at test scale.
//!
//! * The width integral uses Gauss–Legendre rules on octave panels
//!   `[b_max 2^{-k-1}, b_max 2^{-k}]`, `k < width_octaves`. The skipped strip
//!   `(0, ε]` with `ε = b_max 2^{-width_octaves}` contributes `O(ε²)`.
//! * For a fixed width `b` the LCD difference is negligible farther than
//!   `10·b` from every component coordinate, so each axis is covered by the
//!   union of `[c − 10b, c + 10b]` over all coordinates `c`, and every merged
//!   interval gets a uniform trapezoid grid with spacing at most
//!   `b / points_per_width`. The trapezoid rule converges geometrically for
//!   these Gaussian integrands.

use crate::error::{Error, Result};
use crate::mixture::DiracMixture;

use super::check_dims;

const SUPPORT_RADIUS: f64 = 10.0;
const MAX_COMPONENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleResolution {
    /// Trapezoid nodes per kernel width along each axis.
    pub points_per_width: f64,
    /// Number of octave panels in the width integral.
    pub width_octaves: u32,
    /// Gauss–Legendre nodes per panel.
    pub nodes_per_octave: usize,
}

impl Default for OracleResolution {
    fn default() -> Self {
        Self {
            points_per_width: 2.0,
            width_octaves: 20,
            nodes_per_octave: 16,
        }
    }
}

impl OracleResolution {
    /// Doubles the spatial and width resolution.
    pub fn refined(self) -> Self {
        Self {
            points_per_width: 2.0 * self.points_per_width,
            width_octaves: self.width_octaves + 2,
            nodes_per_octave: 2 * self.nodes_per_octave,
        }
    }
}

/// Numerical quadrature of the distance for `N ≤ 2` and at most eight
/// components per mixture.
pub fn distance_quadrature_oracle(
    reduced: &DiracMixture,
    original: &DiracMixture,
    b_max: f64,
    resolution: OracleResolution,
) -> Result<f64> {
    check_dims(reduced, original)?;
    let dim = original.dim();
    if dim > 2 {
        return Err(Error::invalid(format!(
            "quadrature oracle supports N <= 2, got {dim}"
        )));
    }
    if reduced.len() > MAX_COMPONENTS || original.len() > MAX_COMPONENTS {
        return Err(Error::invalid(format!(
            "quadrature oracle supports at most {MAX_COMPONENTS} components per mixture"
        )));
    }
    if !(b_max > 0.0) || !b_max.is_finite() {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    if !(resolution.points_per_width > 0.0) || resolution.nodes_per_octave == 0 {
        return Err(Error::invalid("resolution parameters must be positive"));
    }

    // Signed weights: original +, reduced −.
    let mut points: Vec<&[f64]> = Vec::new();
    let mut signed: Vec<f64> = Vec::new();
    for (p, &w) in original.points().zip(original.weights()) {
        points.push(p);
        signed.push(w);
    }
    for (p, &w) in reduced.points().zip(reduced.weights()) {
        points.push(p);
        signed.push(-w);
    }

    let (gl_nodes, gl_weights) = gauss_legendre(resolution.nodes_per_octave);
    let mut total = 0.0;
    for k in 0..resolution.width_octaves {
        let hi = b_max * 0.5f64.powi(k as i32);
        let lo = 0.5 * hi;
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        for (t, w) in gl_nodes.iter().zip(&gl_weights) {
            let b = mid + half * t;
            let inner = squared_lcd_difference_integral(&points, &signed, dim, b, resolution);
            total += half * w * b.powi(1 - dim as i32) * inner;
        }
    }
    Ok(total)
}

/// `∫ (Σ_i s_i Π_k exp(-(p_ik − m_k)²/(2b²)))² dm` on the trapezoid grid.
fn squared_lcd_difference_integral(
    points: &[&[f64]],
    signed: &[f64],
    dim: usize,
    b: f64,
    resolution: OracleResolution,
) -> f64 {
    let spacing = b / resolution.points_per_width;
    // Per axis: quadrature nodes, weights, and kernel factors per point.
    let axes: Vec<(Vec<f64>, Vec<Vec<f64>>)> = (0..dim)
        .map(|axis| {
            let coords: Vec<f64> = points.iter().map(|p| p[axis]).collect();
            let (nodes, weights) = axis_grid(&coords, b, spacing);
            let factors = coords
                .iter()
                .map(|&c| {
                    nodes
                        .iter()
                        .map(|&m| (-0.5 * (c - m) * (c - m) / (b * b)).exp())
                        .collect()
                })
                .collect();
            (weights, factors)
        })
        .collect();

    match dim {
        1 => {
            let (weights, factors) = &axes[0];
            (0..weights.len())
                .map(|n| {
                    let diff: f64 = signed
                        .iter()
                        .zip(factors)
                        .map(|(s, f)| s * f[n])
                        .sum();
                    weights[n] * diff * diff
                })
                .sum()
        }
        2 => {
            let (wa, fa) = &axes[0];
            let (wb, fb) = &axes[1];
            let mut acc = 0.0;
            let mut partial = vec![0.0; signed.len()];
            for a in 0..wa.len() {
                for (i, s) in signed.iter().enumerate() {
                    partial[i] = s * fa[i][a];
                }
                let mut row = 0.0;
                for n in 0..wb.len() {
                    let diff: f64 = partial.iter().zip(fb).map(|(p, f)| p * f[n]).sum();
                    row += wb[n] * diff * diff;
                }
                acc += wa[a] * row;
            }
            acc
        }
        _ => unreachable!("dimension checked by caller"),
    }
}

/// Trapezoid nodes and weights over the union of `[c − R b, c + R b]`.
fn axis_grid(coords: &[f64], b: f64, spacing: f64) -> (Vec<f64>, Vec<f64>) {
    let mut intervals: Vec<(f64, f64)> = coords
        .iter()
        .map(|&c| (c - SUPPORT_RADIUS * b, c + SUPPORT_RADIUS * b))
        .collect();
    intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::new();
    for (lo, hi) in intervals {
        match merged.last_mut() {
            Some(last) if lo <= last.1 => last.1 = last.1.max(hi),
            _ => merged.push((lo, hi)),
        }
    }
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    for (lo, hi) in merged {
        let panels = ((hi - lo) / spacing).ceil().max(1.0) as usize;
        let h = (hi - lo) / panels as f64;
        for j in 0..=panels {
            nodes.push(lo + j as f64 * h);
            weights.push(if j == 0 || j == panels { 0.5 * h } else { h });
        }
    }
    (nodes, weights)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]` by Newton iteration on
/// `P_n`.
pub(crate) fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // p1 = P_n(x), p0 = P_{n-1}(x)
            let (mut p1, mut p0) = (1.0, 0.0);
            for k in 1..=n {
                let prev = p0;
                p0 = p1;
                p1 = ((2 * k - 1) as f64 * x * p0 - (k - 1) as f64 * prev) / k as f64;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

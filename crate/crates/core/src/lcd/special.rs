//! Special functions behind the closed-form distance.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Arguments `z <= SERIES_LIMIT` use the power series for `E1`, larger ones the
/// continued fraction.
pub const SERIES_LIMIT: f64 = 1.0;

const EPS: f64 = 1e-16;
const MAX_TERMS: usize = 500;

/// Exponential integral `Ei(-z) = -E1(z) = -Γ(0, z)` for `z > 0`.
pub fn ei_neg(z: f64) -> Result<f64> {
    if !(z > 0.0) || z.is_nan() {
        return Err(Error::invalid(format!("ei_neg requires z > 0, got {z}")));
    }
    Ok(-e1(z))
}

/// `E1(z)` for `z > 0`; callers guarantee the domain.
pub(crate) fn e1(z: f64) -> f64 {
    debug_assert!(z > 0.0);
    if z <= SERIES_LIMIT {
        // E1(z) = -γ - ln z - Σ_{k≥1} (-z)^k / (k·k!)
        let mut sum = 0.0;
        let mut term = 1.0;
        for k in 1..MAX_TERMS {
            term *= -z / k as f64;
            let contrib = term / k as f64;
            sum += contrib;
            if contrib.abs() < EPS * sum.abs() {
                break;
            }
        }
        -EULER_GAMMA - z.ln() - sum
    } else {
        // Modified Lentz evaluation of
        // E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
        let tiny = 1e-300;
        let mut b = z + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..MAX_TERMS {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < EPS {
                break;
            }
        }
        h * (-z).exp()
    }
}

/// `z·ln z`, extended by continuity with `xlog(0) = 0`.
pub fn xlog(z: f64) -> Result<f64> {
    if z < 0.0 || z.is_nan() {
        return Err(Error::invalid(format!("xlog requires z >= 0, got {z}")));
    }
    Ok(xlog_nonneg(z))
}

#[inline]
pub(crate) fn xlog_nonneg(z: f64) -> f64 {
    if z == 0.0 {
        0.0
    } else {
        z * z.ln()
    }
}

/// Pair function of the exact distance:
/// `π^{N/2}/8 · (4 b² exp(-z/(4b²)) + z·Ei(-z/(4b²)))`, with the `z = 0` limit
/// `π^{N/2} b²/2`.
pub fn gamma_fn(z: f64, b_max: f64, dim: usize) -> Result<f64> {
    check_gamma_args(z, b_max)?;
    let scale = std::f64::consts::PI.powf(dim as f64 / 2.0) / 8.0;
    Ok(scale * (4.0 * b_max * b_max + gamma_offset_core(z, b_max)))
}

fn check_gamma_args(z: f64, b_max: f64) -> Result<()> {
    if !(b_max > 0.0) || !b_max.is_finite() {
        return Err(Error::invalid(format!("b_max must be positive, got {b_max}")));
    }
    if z < 0.0 || z.is_nan() {
        return Err(Error::invalid(format!("z must be nonnegative, got {z}")));
    }
    Ok(())
}

/// `4b²(exp(-u) - 1) + z·Ei(-u)` with `u = z/(4b²)`, i.e. `8γ(z)/π^{N/2}`
/// minus its value at zero. The subtraction is done analytically through
/// `expm1` so the large `4b²` part never cancels numerically.
#[inline]
pub(crate) fn gamma_offset_core(z: f64, b_max: f64) -> f64 {
    let four_b2 = 4.0 * b_max * b_max;
    let u = z / four_b2;
    if u == 0.0 {
        return 0.0;
    }
    four_b2 * (-u).exp_m1() - z * e1(u)
}

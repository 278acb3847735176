//! Dense BFGS with a backtracking Armijo line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gradient::max_abs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BfgsOptions {
    pub max_iters: usize,
    /// Stop once the max-abs gradient entry is at or below this.
    pub grad_tol: f64,
    /// Stop once an accepted step has max-abs entry below this.
    pub step_tol: f64,
    pub armijo_c1: f64,
    pub backtrack_factor: f64,
    pub max_backtracks: usize,
    /// Curvature updates with `yᵀs` at or below this are skipped.
    pub curvature_eps: f64,
}

impl Default for BfgsOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            grad_tol: 1e-8,
            step_tol: 1e-12,
            armijo_c1: 1e-4,
            backtrack_factor: 0.5,
            max_backtracks: 60,
            curvature_eps: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    LineSearchFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub objective: f64,
    pub grad_max_abs: f64,
    pub step_length: f64,
}

#[derive(Debug, Clone)]
pub struct BfgsResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub gradient: Vec<f64>,
    pub status: Status,
    /// Iteration 0 is the starting point, with step length 0.
    pub records: Vec<IterationRecord>,
}

impl BfgsResult {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn identity(n: usize) -> Vec<f64> {
    let mut h = vec![0.0; n * n];
    for i in 0..n {
        h[i * n + i] = 1.0;
    }
    h
}

fn mat_vec(h: &[f64], v: &[f64]) -> Vec<f64> {
    h.chunks_exact(v.len()).map(|row| dot(row, v)).collect()
}

/// Minimizes `objective` from `x0`, with `gradient` its derivative.
///
/// The inverse-Hessian approximation starts at the identity and is rescaled
/// by `yᵀs / yᵀy` right before the first curvature update. When a search
/// direction fails the line search the approximation is reset to the identity
/// once; a second failure ends the run with [`Status::LineSearchFailed`].
pub fn bfgs_minimize<F, G>(
    mut objective: F,
    mut gradient: G,
    x0: Vec<f64>,
    opts: &BfgsOptions,
) -> Result<BfgsResult>
where
    F: FnMut(&[f64]) -> f64,
    G: FnMut(&[f64]) -> Vec<f64>,
{
    let n = x0.len();
    let mut x = x0;
    let mut f = objective(&x);
    let mut g = gradient(&x);
    if !f.is_finite() || g.len() != n || g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteStart);
    }
    let mut records = vec![IterationRecord {
        objective: f,
        grad_max_abs: max_abs(&g),
        step_length: 0.0,
    }];
    let mut h = identity(n);
    let mut h_is_identity = true;
    let mut updated = false;
    let mut status = Status::MaxIters;

    for _ in 0..opts.max_iters {
        if max_abs(&g) <= opts.grad_tol {
            status = Status::Converged;
            break;
        }

        let mut accepted = None;
        for _attempt in 0..2 {
            let mut dir: Vec<f64> = mat_vec(&h, &g).into_iter().map(|v| -v).collect();
            let mut slope = dot(&g, &dir);
            if !(slope < 0.0) {
                h = identity(n);
                h_is_identity = true;
                dir = g.iter().map(|v| -v).collect();
                slope = -dot(&g, &g);
            }
            let mut alpha = 1.0;
            for _ in 0..=opts.max_backtracks {
                let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + alpha * d).collect();
                let ft = objective(&trial);
                if ft.is_finite() && ft <= f + opts.armijo_c1 * alpha * slope {
                    accepted = Some((trial, ft));
                    break;
                }
                alpha *= opts.backtrack_factor;
            }
            if accepted.is_some() || h_is_identity {
                break;
            }
            h = identity(n);
            h_is_identity = true;
        }
        let Some((x_new, f_new)) = accepted else {
            status = Status::LineSearchFailed;
            break;
        };

        let g_new = gradient(&x_new);
        if g_new.iter().any(|v| !v.is_finite()) {
            status = Status::LineSearchFailed;
            break;
        }
        let s: Vec<f64> = x_new.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        x = x_new;
        f = f_new;
        g = g_new;
        let step = max_abs(&s);
        records.push(IterationRecord {
            objective: f,
            grad_max_abs: max_abs(&g),
            step_length: step,
        });

        let ys = dot(&y, &s);
        if ys > opts.curvature_eps {
            if !updated {
                let scale = ys / dot(&y, &y);
                h.iter_mut().for_each(|v| *v *= scale);
                updated = true;
            }
            inverse_update(&mut h, &s, &y, ys);
            h_is_identity = false;
        }

        if step < opts.step_tol {
            status = Status::Converged;
            break;
        }
    }
    if status == Status::MaxIters && max_abs(&g) <= opts.grad_tol {
        status = Status::Converged;
    }

    Ok(BfgsResult {
        x,
        objective: f,
        gradient: g,
        status,
        records,
    })
}

/// `H ← (I − ρ s yᵀ) H (I − ρ y sᵀ) + ρ s sᵀ` with `ρ = 1/(yᵀs)`.
fn inverse_update(h: &mut [f64], s: &[f64], y: &[f64], ys: f64) {
    let n = s.len();
    let rho = 1.0 / ys;
    let hy = mat_vec(h, y);
    let yhy = dot(y, &hy);
    let c = rho * rho * yhy + rho;
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += c * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rosenbrock(v: &[f64]) -> f64 {
        (1.0 - v[0]).powi(2) + 100.0 * (v[1] - v[0] * v[0]).powi(2)
    }

    fn rosenbrock_grad(v: &[f64]) -> Vec<f64> {
        vec![
            -2.0 * (1.0 - v[0]) - 400.0 * v[0] * (v[1] - v[0] * v[0]),
            200.0 * (v[1] - v[0] * v[0]),
        ]
    }

    #[test]
    fn quadratic_converges_fast() {
        let c = [1.5, -2.0, 0.25, 4.0];
        let f = |v: &[f64]| v.iter().zip(&c).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let g = |v: &[f64]| v.iter().zip(&c).map(|(a, b)| 2.0 * (a - b)).collect::<Vec<_>>();
        for start in [vec![0.0; 4], vec![-10.0, 3.0, 7.0, 0.0]] {
            let r = bfgs_minimize(f, g, start, &BfgsOptions::default()).unwrap();
            assert_eq!(r.status, Status::Converged);
            assert!(r.iterations() <= c.len() + 5);
            for (a, b) in r.x.iter().zip(&c) {
                assert!((a - b).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn start_at_minimum() {
        let r = bfgs_minimize(
            |v: &[f64]| v[0] * v[0],
            |v: &[f64]| vec![2.0 * v[0]],
            vec![0.0],
            &BfgsOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::Converged);
        assert_eq!(r.iterations(), 0);
    }

    #[test]
    fn rosenbrock_from_classic_start() {
        // Long gradient-descent run as an independent reference for the minimizer.
        let mut v = [-1.2, 1.0];
        for _ in 0..2_000_000 {
            let g = rosenbrock_grad(&v);
            v[0] -= 1e-3 * g[0];
            v[1] -= 1e-3 * g[1];
        }
        assert!((v[0] - 1.0).abs() < 1e-6 && (v[1] - 1.0).abs() < 1e-6);

        let r = bfgs_minimize(
            rosenbrock,
            rosenbrock_grad,
            vec![-1.2, 1.0],
            &BfgsOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status, Status::Converged);
        assert!((r.x[0] - v[0]).abs() < 1e-6 && (r.x[1] - v[1]).abs() < 1e-6);
        assert!(r
            .records
            .windows(2)
            .all(|w| w[1].objective <= w[0].objective));
    }

    #[test]
    fn non_finite_start() {
        let r = bfgs_minimize(
            |_: &[f64]| f64::NAN,
            |_: &[f64]| vec![0.0],
            vec![0.0],
            &BfgsOptions::default(),
        );
        assert!(matches!(r, Err(Error::NonFiniteStart)));
    }

    #[test]
    fn max_iters_reported() {
        let opts = BfgsOptions {
            max_iters: 2,
            ..BfgsOptions::default()
        };
        let r = bfgs_minimize(rosenbrock, rosenbrock_grad, vec![-1.2, 1.0], &opts).unwrap();
        assert_eq!(r.status, Status::MaxIters);
        assert_eq!(r.iterations(), 2);
    }
}

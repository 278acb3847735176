//! Shared helpers for the integration tests: random instances, finite
//! differences and an independent quadrature for `E1`.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use lcd_reduce::DiracMixture;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct InstanceSpec {
    pub dim: usize,
    pub min_original: usize,
    pub max_original: usize,
    pub max_reduced: usize,
    /// Minimum distance between any two points of the instance.
    pub min_separation: f64,
}

fn unit_ball_point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let p: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
        if p.iter().map(|v| v * v).sum::<f64>() <= 1.0 {
            return p;
        }
    }
}

fn separated(points: &[Vec<f64>], p: &[f64], min: f64) -> bool {
    points.iter().all(|q| {
        q.iter().zip(p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() > min
    })
}

/// Random `(reduced, original)` pair with points in the unit ball and random
/// positive weights.
pub fn random_instance(spec: &InstanceSpec, seed: u64) -> (DiracMixture, DiracMixture) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.random_range(spec.min_original..=spec.max_original);
    let l = rng.random_range(1..=spec.max_reduced);
    let mut points: Vec<Vec<f64>> = Vec::new();
    while points.len() < m + l {
        let p = unit_ball_point(&mut rng, spec.dim);
        if separated(&points, &p, spec.min_separation) {
            points.push(p);
        }
    }
    let mut weights = |n: usize| -> Vec<f64> { (0..n).map(|_| rng.random_range(0.2..1.0)).collect() };
    let wy = weights(m);
    let wx = weights(l);
    let original = DiracMixture::new(&points[..m], &wy).unwrap();
    let reduced = DiracMixture::new(&points[m..], &wx).unwrap();
    (reduced, original)
}

/// Translates `m` so its weighted mean equals `mean`.
pub fn shift_to_mean(m: &DiracMixture, mean: &[f64]) -> DiracMixture {
    let current = m.mean();
    let rows: Vec<Vec<f64>> = m
        .points()
        .map(|p| p.iter().zip(&current).zip(mean).map(|((v, c), t)| v - c + t).collect())
        .collect();
    DiracMixture::new(&rows, m.weights()).unwrap()
}

/// Central differences of `f` with respect to every location coordinate.
pub fn fd_gradient(m: &DiracMixture, h: f64, f: impl Fn(&DiracMixture) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.locations().len());
    for i in 0..m.locations().len() {
        let shifted = |delta: f64| {
            let mut locs = m.locations().to_vec();
            locs[i] += delta;
            DiracMixture::from_flat(m.dim(), locs, m.weights().to_vec()).unwrap()
        };
        out.push((f(&shifted(h)) - f(&shifted(-h))) / (2.0 * h));
    }
    out
}

/// `max |a − b| / max |a|`.
pub fn relative_max_error(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let err = a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()));
    err / scale
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
    let m = 0.5 * (a + b);
    let fm = f(m);
    (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
}

#[allow(clippy::too_many_arguments)]
fn adaptive(
    f: &impl Fn(f64) -> f64,
    a: f64,
    fa: f64,
    b: f64,
    fb: f64,
    m: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let (lm, flm, left) = simpson(f, a, fa, m, fm);
    let (rm, frm, right) = simpson(f, m, fm, b, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, fa, m, fm, lm, flm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, fm, b, fb, rm, frm, right, tol / 2.0, depth - 1)
}

/// `∫_a^b f` by adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(&f, a, fa, b, fb);
    adaptive(&f, a, fa, b, fb, m, fm, whole, tol, 60)
}

/// `E1(z) = ∫_0^∞ exp(−z·e^s) ds` by adaptive Simpson quadrature. The upper
/// limit is cut where the integrand falls below `e^{-745}`.
pub fn e1_quadrature(z: f64) -> f64 {
    let upper = (745.0 / z).ln();
    // The integrand starts at e^{-z}; the integral is of that order or larger.
    integrate(|s: f64| (-z * s.exp()).exp(), 0.0, upper, 1e-15 * (-z).exp().min(1.0))
}

/// Relative paths of all files below `dir`, sorted.
pub fn list_files(dir: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                out.push(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    walk(dir, dir, &mut out);
    out.sort();
    out
}

//! Invariants as property tests, plus the larger reduction examples.

mod common;

use proptest::prelude::*;

use lcd_reduce::baselines::{kmeans, kmeans_reduce, DEFAULT_KMEANS_ITERS};
use lcd_reduce::distance::{distance_approx, distance_exact};
use lcd_reduce::gradient::{grad_approx, grad_exact, stationarity_residual, KappaMode};
use lcd_reduce::metrics::mode_allocation;
use lcd_reduce::mixture::{sample_gaussian_mixture, sample_standard_normal, DiracMixture};
use lcd_reduce::optim::Status;
use lcd_reduce::reduce::{hierarchical_reduce, reduce, ReduceConfig};
use lcd_reduce::scenario::{four_mode_spec, generate, Scenario, OUTLIER_LOCATION};

fn mixture(dim: usize, max: usize) -> impl Strategy<Value = DiracMixture> {
    (1..=max).prop_flat_map(move |n| {
        (
            prop::collection::vec(-1.0..1.0f64, n * dim),
            prop::collection::vec(0.05..1.0f64, n),
        )
            .prop_map(move |(locs, w)| DiracMixture::from_flat(dim, locs, w).unwrap())
    })
}

fn pair(max_x: usize, max_y: usize) -> impl Strategy<Value = (DiracMixture, DiracMixture)> {
    (1..=3usize).prop_flat_map(move |dim| (mixture(dim, max_x), mixture(dim, max_y)))
}

fn translate(m: &DiracMixture, shift: &[f64]) -> DiracMixture {
    let locs = m
        .locations()
        .chunks(m.dim())
        .flat_map(|p| p.iter().zip(shift).map(|(a, b)| a + b).collect::<Vec<_>>())
        .collect();
    DiracMixture::from_flat(m.dim(), locs, m.weights().to_vec()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validation_is_idempotent(m in mixture(2, 12)) {
        let again = DiracMixture::from_flat(2, m.locations().to_vec(), m.weights().to_vec()).unwrap();
        prop_assert_eq!(again, m);
    }

    #[test]
    fn equal_weight_mean_is_centroid(locs in prop::collection::vec(-10.0..10.0f64, 3..60)) {
        let n = locs.len() / 3;
        let locs = locs[..n * 3].to_vec();
        let m = DiracMixture::equal_weights_flat(3, locs.clone()).unwrap();
        for k in 0..3 {
            let centroid = (0..n).map(|i| locs[i * 3 + k]).sum::<f64>() / n as f64;
            prop_assert!((m.mean()[k] - centroid).abs() < 1e-12);
        }
    }

    #[test]
    fn gm_counts_sum_and_round(n in 1usize..5000, a in 0.05..1.0f64, b in 0.05..1.0f64) {
        let mut spec = four_mode_spec();
        let total = 2.0 * (a + b);
        for (c, m) in spec.components.iter_mut().zip([a, b, b, a]) {
            c.mass = m / total;
        }
        spec.components[3].mass = 1.0 - spec.components[..3].iter().map(|c| c.mass).sum::<f64>();
        let counts = spec.component_counts(n);
        prop_assert_eq!(counts.iter().sum::<usize>(), n);
        for (c, comp) in counts.iter().zip(&spec.components) {
            prop_assert!((*c as f64 - n as f64 * comp.mass).abs() < 1.0);
        }
    }

    #[test]
    fn generators_are_pure(seed in any::<u64>(), n in 1usize..50) {
        prop_assert_eq!(sample_standard_normal(n, 2, seed).unwrap(), sample_standard_normal(n, 2, seed).unwrap());
        let spec = four_mode_spec();
        prop_assert_eq!(
            sample_gaussian_mixture(&spec, n, seed).unwrap(),
            sample_gaussian_mixture(&spec, n, seed).unwrap()
        );
    }

    #[test]
    fn exact_distance_is_symmetric((p, q) in pair(4, 4), b_max in 0.3..3.0f64) {
        let a = distance_exact(&p, &q, b_max).unwrap().total;
        let b = distance_exact(&q, &p, b_max).unwrap().total;
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
    }

    #[test]
    fn exact_distance_separates_supports((p, q) in pair(3, 3), b_max in 0.3..3.0f64) {
        // Random supports differ almost surely.
        prop_assert!(distance_exact(&p, &q, b_max).unwrap().total > 0.0);
    }

    #[test]
    fn reported_parts_reproduce_total((p, q) in pair(4, 6), b_max in 0.3..3.0f64, c_b in 1.0..1e3f64) {
        let r = distance_exact(&p, &q, b_max).unwrap();
        prop_assert!((r.total_from_parts(p.dim()) - r.total).abs() <= 1e-12 * r.total.abs().max(1e-12));
        let r = distance_approx(&p, &q, c_b).unwrap();
        prop_assert!((r.total_from_parts(p.dim()) - r.total).abs() <= 1e-12 * r.total.abs().max(1e-12));
    }

    #[test]
    fn gradients_are_translation_equivariant(
        (p, q) in pair(4, 6),
        shift in prop::collection::vec(-5.0..5.0f64, 3),
    ) {
        let shift = &shift[..p.dim()];
        let (ps, qs) = (translate(&p, shift), translate(&q, shift));
        let pairs = [
            (grad_exact(&p, &q, 1.0).unwrap(), grad_exact(&ps, &qs, 1.0).unwrap()),
            (
                grad_approx(&p, &q, 50.0, KappaMode::CbMinusOne).unwrap(),
                grad_approx(&ps, &qs, 50.0, KappaMode::CbMinusOne).unwrap(),
            ),
        ];
        for (a, b) in pairs {
            for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
                prop_assert!((x - y).abs() < 1e-10, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn mode_counts_sum_to_l(m in mixture(2, 30)) {
        let counts = mode_allocation(&m, &four_mode_spec().means()).unwrap();
        prop_assert_eq!(counts.iter().sum::<usize>(), m.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn reduce_trace_is_monotone_and_deterministic(seed in 0u64..1000, l in 1usize..6) {
        let original = sample_standard_normal(60, 2, seed).unwrap();
        let cfg = ReduceConfig::new(l).with_seed(seed);
        let (a, trace) = reduce(&original, &cfg).unwrap();
        let (b, _) = reduce(&original, &cfg).unwrap();
        prop_assert_eq!(a.locations(), b.locations());
        prop_assert!(a.weights().iter().all(|&w| w == 1.0 / l as f64));
        for w in trace.records.windows(2) {
            prop_assert!(w[1].objective <= w[0].objective);
        }
    }

    #[test]
    fn lloyd_objective_never_increases(seed in 0u64..1000, l in 1usize..8) {
        let original = sample_standard_normal(80, 2, seed).unwrap();
        let r = kmeans(&original, l, seed, DEFAULT_KMEANS_ITERS).unwrap();
        for w in r.objective_history.windows(2) {
            prop_assert!(w[1] <= w[0] + 1e-12);
        }
    }
}

#[test]
fn kmeans_depends_on_seed() {
    let original = sample_standard_normal(200, 2, 3).unwrap();
    let centers: Vec<Vec<f64>> = (0..5)
        .map(|s| kmeans_reduce(&original, 8, s, DEFAULT_KMEANS_ITERS).unwrap().locations().to_vec())
        .collect();
    assert!(centers.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn standard_normal_reductions_spread_out() {
    let original = sample_standard_normal(2000, 2, 1).unwrap();
    assert_eq!(original.len(), 2000);
    assert!(original.weights().iter().all(|&w| w == 1.0 / 2000.0));
    for l in [10, 20, 30] {
        let (r, trace) = reduce(&original, &ReduceConfig::new(l).with_seed(1)).unwrap();
        // Progress stalls far below any visible change; report rather than
        // require the gradient tolerance.
        if trace.status != Status::Converged {
            eprintln!("L = {l}: {:?} after {} iterations", trace.status, trace.iterations());
        }
        let dev = r.mean().iter().zip(original.mean()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(dev < 0.05, "L = {l}: mean deviation {dev}");
        for i in 0..l {
            for j in (i + 1)..l {
                let d: f64 = r.point(i).iter().zip(r.point(j)).map(|(a, b)| (a - b) * (a - b)).sum();
                assert!(d.sqrt() > 1e-3, "L = {l}: points {i} and {j} coincide");
            }
        }
        let (lo, hi) = original.bounds()[0];
        assert!(r.points().all(|p| p[0] > lo && p[0] < hi));
    }
}

#[test]
fn hierarchical_preserves_mean() {
    let original = generate(Scenario::Gm, 4000, 2, 5).unwrap();
    let cfg = ReduceConfig::new(40).with_seed(5);
    let (r, summary) = hierarchical_reduce(&original, 500, &cfg).unwrap();
    assert_eq!(r.len(), 40);
    assert_eq!(summary.chunk_sizes.iter().sum::<usize>(), 4000);
    let dev = r.mean().iter().zip(original.mean()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(dev < 0.05, "{dev}");
    let (again, _) = hierarchical_reduce(&original, 500, &cfg).unwrap();
    assert_eq!(r, again);
}

#[test]
fn kmeans_lands_on_the_outlier_for_some_seed() {
    let hit = (1..=10).any(|seed| {
        let original = generate(Scenario::Outlier, 100, 2, seed).unwrap();
        let k = kmeans_reduce(&original, 10, seed, DEFAULT_KMEANS_ITERS).unwrap();
        let near = k.points().any(|p| {
            p.iter().zip(OUTLIER_LOCATION).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < 0.1
        });
        near
    });
    assert!(hit);
}

#[test]
fn stationarity_at_converged_outputs() {
    let symmetric = DiracMixture::equal_weights_flat(1, vec![-1.0, 1.0]).unwrap();
    let centre = DiracMixture::equal_weights_flat(1, vec![0.0]).unwrap();
    assert_eq!(stationarity_residual(&centre, &symmetric).unwrap().max_abs(), 0.0);

    let mut checked = 0;
    for seed in 0..6 {
        let original = sample_standard_normal(300, 2, seed).unwrap();
        let (r, trace) = reduce(&original, &ReduceConfig::new(6).with_seed(seed).with_c_b(1e3)).unwrap();
        if trace.status != Status::Converged {
            continue;
        }
        checked += 1;
        let scaled = stationarity_residual(&r, &original).unwrap().max_abs()
            / (original.len() as f64 * original.spread());
        assert!(scaled < 1e-5, "seed {seed}: {scaled:e}");
    }
    assert!(checked > 0, "no run converged");
}

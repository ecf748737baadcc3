use isus_core::benchmarks::Benchmark;
use isus_core::density::optimal_marginal;
use isus_core::pipeline::{fit_pools, synthetic_datasets};
use isus_core::{InferenceConfig, MasterSeed, MixtureDensity, ModelPool};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use std::sync::OnceLock;

/// Yield-shift pool of the plate problem from 25 points.
fn plate_pool() -> &'static ModelPool {
    static POOL: OnceLock<ModelPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let bench = Benchmark::Plate;
        let seed = MasterSeed(61);
        let data = synthetic_datasets(&bench.truth(), &bench.variables(), 25, seed).unwrap();
        fit_pools(&data[..1], &InferenceConfig::default(), seed).unwrap().remove(0)
    })
}

fn mixture(seed: u64) -> MixtureDensity {
    let mut rng = MasterSeed(seed).stream("mixture", &[]);
    optimal_marginal(plate_pool(), 500, &mut rng).unwrap()
}

/// `∫ p` split at `center` and mapped through `x = center ± e^t` on both
/// sides, in short pieces so kinks at component support edges stay local.
fn total_mass(m: &MixtureDensity, center: f64, scale: f64) -> f64 {
    let (lo, hi) = ((1e-12 * scale).ln(), (1e14 * scale).ln());
    let pieces = 260;
    let h = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = lo + i as f64 * h;
            let f = |t: f64| {
                let y = t.exp();
                (m.pdf(center + y) + m.pdf(center - y)) * y
            };
            quadrature::integrate(f, a, a + h, 1e-13).integral
        })
        .sum()
}

#[test]
fn optimal_mixture_is_normalized() {
    let m = mixture(62);
    assert!(m.len() > 1);
    let weight: f64 = m.components().iter().map(|c| c.weight).sum();
    assert!((weight - 1.0).abs() < 1e-12);
    let mass = total_mass(&m, 10.0, 5.0);
    assert!((mass - 1.0).abs() < 1e-4, "mass {mass}");
}

#[test]
fn resampling_the_clouds_barely_moves_the_density() {
    let pool = plate_pool();
    let mut shuffled = pool.clone();
    let mut rng = MasterSeed(63).stream("shuffle", &[]);
    for cloud in &mut shuffled.clouds {
        cloud.samples.shuffle(&mut rng);
    }
    let a = mixture(64);
    let b = optimal_marginal(&shuffled, 500, &mut MasterSeed(65).stream("mixture", &[])).unwrap();
    let truth = &Benchmark::Plate.truth().specs[0];
    for p in [0.1, 0.25, 0.5, 0.75, 0.9] {
        let (mu, sigma) = (truth.theta[0], truth.theta[1]);
        let x = (mu + sigma * statrs::function::erf::erf_inv(2.0 * p - 1.0) * std::f64::consts::SQRT_2).exp();
        let (pa, pb) = (a.pdf(x), b.pdf(x));
        assert!((pa / pb - 1.0).abs() < 0.02, "quantile {p}: {pa} vs {pb}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn mixture_density_is_continuous(x in 0.05f64..80.0) {
        let m = mixture(62);
        let h = 1e-7 * x;
        let (p0, p1) = (m.pdf(x), m.pdf(x + h));
        prop_assert!((p1 - p0).abs() <= 1e-4 * p0.max(1e-12), "{} vs {} at {}", p0, p1, x);
        prop_assert!((m.ln_pdf(x).exp() - p0).abs() <= 1e-12 * p0.max(1e-300));
    }
}

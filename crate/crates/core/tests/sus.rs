use isus_core::benchmarks::{linear::linear_exact_pf, mc_oracle, Benchmark};
use isus_core::inference::CandidateModel;
use isus_core::pipeline::{fit_pools, optimal_density, synthetic_datasets, IsusConfig};
use isus_core::stats::{mean, std_dev};
use isus_core::sus::{level_threshold, run_sus, SusConfig};
use isus_core::{DistributionSpec, InferenceConfig, MasterSeed, SamplingDensity};
use proptest::prelude::*;

fn standard_normal(d: usize) -> SamplingDensity {
    SamplingDensity::Candidate(CandidateModel::new(vec![DistributionSpec::normal(0.0, 1.0).unwrap(); d]).unwrap())
}

fn linear_runs(n: usize, runs: u64, seed: u64) -> Vec<f64> {
    let g = Benchmark::Linear { beta: 3.0 };
    (0..runs)
        .map(|r| {
            let cfg = SusConfig {
                samples_per_level: n,
                seed: MasterSeed(seed).child("run", &[r]),
                ..SusConfig::default()
            };
            run_sus(&g, standard_normal(2), &cfg).unwrap().pf_baseline
        })
        .collect()
}

proptest! {
    #[test]
    fn threshold_and_seed_invariants(values in prop::collection::vec(-50.0f64..50.0, 100), dup in 0usize..100) {
        let mut g = values.clone();
        g[dup] = g[(dup + 7) % 100];
        let (b, seeds) = level_threshold(&g, 0.1).unwrap();
        prop_assert_eq!(seeds.len(), 10);
        let worst_seed = seeds.iter().map(|&i| g[i]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(worst_seed <= b);
        let others = (0..100).filter(|i| !seeds.contains(i)).map(|i| g[i]).fold(f64::INFINITY, f64::min);
        prop_assert!(worst_seed <= others);
        prop_assert!(b <= others);
        prop_assert!(g.iter().filter(|v| **v <= b).count() >= 10);
    }
}

#[test]
fn every_level_respects_its_conditioning_threshold() {
    let g = Benchmark::Linear { beta: 3.5 };
    for r in 0..10 {
        let cfg = SusConfig {
            seed: MasterSeed(31).child("run", &[r]),
            ..SusConfig::default()
        };
        let run = run_sus(&g, standard_normal(2), &cfg).unwrap();
        assert!(run.converged);
        assert!(run.n_levels() >= 3);
        assert_eq!(run.levels.last().unwrap().threshold, 0.0);
        let ts = run.thresholds();
        assert!(ts.windows(2).all(|w| w[1] < w[0]), "{ts:?}");
        let product: f64 = run.levels.iter().map(|l| l.fraction()).product();
        assert!((product - run.pf_baseline).abs() <= 1e-15 * product);
        for (i, level) in run.levels.iter().enumerate() {
            assert_eq!(level.len(), cfg.samples_per_level);
            assert!(level.g_values.iter().all(|v| *v <= level.conditioning));
            assert_eq!(level.count_below, level.g_values.iter().filter(|v| **v <= level.threshold).count());
            if i > 0 {
                let prev = &run.levels[i - 1];
                assert_eq!(level.conditioning, prev.threshold);
                let seeds: Vec<&Vec<f64>> = prev.seed_indices.iter().map(|&j| &prev.samples[j]).collect();
                let first_states: Vec<&Vec<f64>> = level.samples[..level.chains].iter().collect();
                assert_eq!(seeds, first_states);
            }
        }
    }
}

#[test]
fn linear_estimates_are_unbiased() {
    let exact = linear_exact_pf(3.0);
    let pf = linear_runs(1000, 200, 32);
    let m = mean(&pf);
    let se = std_dev(&pf) / (pf.len() as f64).sqrt();
    assert!((m - exact).abs() < 4.0 * se, "mean {m:.4e} vs {exact:.4e} (se {se:.2e})");
}

/// Doubling N halves the estimator variance up to sampling noise in the
/// variance ratio (F distribution with 199, 199 degrees of freedom).
#[test]
fn doubling_samples_halves_variance() {
    let small = linear_runs(500, 200, 33);
    let large = linear_runs(1000, 200, 34);
    let ratio = std_dev(&small).powi(2) / std_dev(&large).powi(2);
    assert!((1.3..3.1).contains(&ratio), "variance ratio {ratio}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let bench = Benchmark::Plate;
    let run_with = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let seed = MasterSeed(35);
            let data = synthetic_datasets(&bench.truth(), &bench.variables(), 30, seed).unwrap();
            let cfg = IsusConfig {
                seed,
                inference: InferenceConfig {
                    n_theta: 2_000,
                    ..InferenceConfig::default()
                },
                n_c: 50,
                ..IsusConfig::default()
            };
            let pools = fit_pools(&data, &cfg.inference, seed).unwrap();
            let density = optimal_density(&pools, cfg.n_mix, seed).unwrap();
            let run = run_sus(&bench, SamplingDensity::Mixture(density), &cfg.sus_config()).unwrap();
            let mc = mc_oracle(&bench, &bench.truth(), 50_000, seed).unwrap();
            (
                serde_json::to_string(&pools).unwrap(),
                serde_json::to_string(&run).unwrap(),
                mc,
            )
        })
    };
    let one = run_with(1);
    let four = run_with(4);
    assert!(one.0 == four.0, "model pools differ");
    assert!(one.1 == four.1, "subset simulation runs differ");
    assert_eq!(one.2, four.2);
}

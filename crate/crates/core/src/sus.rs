//! Subset simulation with stretch-move conditional sampling.
//!
//! Level 1 draws `N` points from the sampling density. Each later level
//! starts from the `p0·N` points with the smallest responses, uses them as a
//! stretch-move ensemble restricted to `{g ≤ b}`, and advances every walker
//! `1/p0 − 1` steps so the level again holds `N` states (seeds included).

use log::{debug, warn};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{LogDensity, SampleDensity, SamplingDensity};
use crate::error::{Error, Result};
use crate::inference::ensemble::{halves, propose_half};
use crate::rng::MasterSeed;

/// A scalar response; failure is `g(x) ≤ 0`.
pub trait PerformanceFunction: Sync {
    fn evaluate(&self, x: &[f64]) -> Result<f64>;

    /// Evaluate a batch of points. The default fans out over the rayon pool
    /// and returns results in input order.
    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        xs.par_iter().map(|x| self.evaluate(x)).collect()
    }
}

/// Adapter for a plain closure.
pub struct LimitStateFn<F>(pub F);

impl<F: Fn(&[f64]) -> f64 + Sync> PerformanceFunction for LimitStateFn<F> {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok((self.0)(x))
    }
}

impl<P: PerformanceFunction + ?Sized> PerformanceFunction for &P {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        (**self).evaluate(x)
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        (**self).evaluate_batch(xs)
    }
}

/// Evaluate a batch and reject non-finite responses.
pub fn checked_batch<P: PerformanceFunction + ?Sized>(g: &P, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
    let values = g.evaluate_batch(xs)?;
    if values.len() != xs.len() {
        return Err(Error::Model(format!(
            "performance function returned {} values for {} points",
            values.len(),
            xs.len()
        )));
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFiniteResponse {
            value: values[i],
            point: xs[i].clone(),
        });
    }
    Ok(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusConfig {
    /// Samples per level `N`.
    pub samples_per_level: usize,
    /// Target conditional probability `p0`.
    pub p0: f64,
    pub max_levels: usize,
    pub stretch_scale: f64,
    pub seed: MasterSeed,
}

impl Default for SusConfig {
    fn default() -> Self {
        SusConfig {
            samples_per_level: 1000,
            p0: 0.1,
            max_levels: 20,
            stretch_scale: 2.0,
            seed: MasterSeed(0),
        }
    }
}

impl SusConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.p0 > 0.0 && self.p0 < 1.0) {
            return Err(Error::InvalidArgument(format!("p0 must be in (0, 1), got {}", self.p0)));
        }
        self.seeds_per_level()?;
        if self.max_levels == 0 {
            return Err(Error::InvalidArgument("max_levels must be at least 1".into()));
        }
        if !(self.stretch_scale > 1.0) {
            return Err(Error::InvalidArgument("stretch scale must exceed 1".into()));
        }
        Ok(())
    }

    /// `p0·N`, which must be an integer ≥ 2 dividing `N`.
    pub fn seeds_per_level(&self) -> Result<usize> {
        seed_count(self.samples_per_level, self.p0)
    }
}

fn seed_count(n: usize, p0: f64) -> Result<usize> {
    let exact = p0 * n as f64;
    let ns = exact.round();
    if (exact - ns).abs() > 1e-9 * exact.max(1.0) || ns < 2.0 {
        return Err(Error::InvalidArgument(format!(
            "p0·N = {exact} must be an integer of at least 2"
        )));
    }
    let ns = ns as usize;
    if n % ns != 0 {
        return Err(Error::InvalidArgument(format!("p0·N = {ns} must divide N = {n}")));
    }
    Ok(ns)
}

/// One conditional level.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub index: usize,
    /// Upper bound on `g` for every sample of this level (`+∞` at level 1).
    pub conditioning: f64,
    /// Threshold defining the next subset; 0 on the final level.
    pub threshold: f64,
    pub samples: Vec<Vec<f64>>,
    pub g_values: Vec<f64>,
    /// Log sampling density at each sample.
    pub ln_q: Vec<f64>,
    /// Indices of the `p0·N` smallest responses.
    pub seed_indices: Vec<usize>,
    /// Number of samples with `g ≤ threshold`.
    pub count_below: usize,
    /// Walkers in the conditional chains (0 at level 1).
    pub chains: usize,
    pub acceptance_rate: f64,
}

impl Level {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// `count_below / N`.
    pub fn fraction(&self) -> f64 {
        self.count_below as f64 / self.samples.len() as f64
    }
}

/// Full record of one subset simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusRun {
    pub config: SusConfig,
    pub density: SamplingDensity,
    pub levels: Vec<Level>,
    pub pf_baseline: f64,
    pub cov_baseline: f64,
    /// Every call of the performance function, rejected proposals included.
    pub g_evaluations: u64,
    /// Number of states retained across all levels.
    pub retained_samples: u64,
    pub converged: bool,
}

impl SusRun {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn thresholds(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.threshold).collect()
    }
}

/// Threshold and seeds from one level's responses.
///
/// Sorts ascending (ties by sample index), takes `b` as the midpoint of the
/// `p0·N`-th and `(p0·N + 1)`-th order statistics and the `p0·N` smallest as
/// seeds. When those two order statistics tie, `b` is the tied value.
pub fn level_threshold(g_values: &[f64], p0: f64) -> Result<(f64, Vec<usize>)> {
    let n = g_values.len();
    let exact = p0 * n as f64;
    let ns = exact.round();
    if (exact - ns).abs() > 1e-9 * exact.max(1.0) || ns < 1.0 || ns as usize >= n {
        return Err(Error::InvalidArgument(format!("p0·N = {exact} must be an integer in [1, N)")));
    }
    let ns = ns as usize;
    let finite = g_values.iter().filter(|v| v.is_finite()).count();
    if finite <= ns {
        return Err(Error::DegenerateThreshold(format!(
            "only {finite} finite responses for {ns} seeds"
        )));
    }
    let order: Vec<usize> = smallest_indices(g_values, finite);
    if g_values[order[0]] == g_values[order[order.len() - 1]] {
        return Err(Error::DegenerateThreshold(format!(
            "all responses equal {}",
            g_values[order[0]]
        )));
    }
    let lo = g_values[order[ns - 1]];
    let hi = g_values[order[ns]];
    let b = if lo == hi { lo } else { 0.5 * (lo + hi) };
    Ok((b, order[..ns].to_vec()))
}

/// Indices of the `k` smallest values, ties broken by index.
pub fn smallest_indices(values: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    order.truncate(k);
    order
}

/// Output of one conditional sampling stage.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalSamples {
    pub samples: Vec<Vec<f64>>,
    pub g_values: Vec<f64>,
    pub ln_q: Vec<f64>,
    pub acceptance_rate: f64,
    pub g_evaluations: u64,
}

/// Stretch-move sampling of `q(x)·I(g(x) ≤ b)` from the given seeds.
///
/// The seeds are the walkers. Each of the `n / seeds` chain steps updates
/// the two half-ensembles in turn; a proposal is first screened by the
/// stretch acceptance test on `q`, and only survivors are passed to `g`.
/// States are stored step-major with the seeds first.
#[allow(clippy::too_many_arguments)]
pub fn conditional_mcmc<D, P, R>(
    seeds: &[Vec<f64>],
    seed_g: &[f64],
    seed_ln_q: &[f64],
    density: &D,
    g: &P,
    b: f64,
    n: usize,
    a: f64,
    rng: &mut R,
) -> Result<ConditionalSamples>
where
    D: LogDensity + ?Sized,
    P: PerformanceFunction + ?Sized,
    R: Rng + ?Sized,
{
    let ns = seeds.len();
    if ns < 2 {
        return Err(Error::EnsembleTooSmall { required: 2, got: ns });
    }
    if n % ns != 0 || n < ns {
        return Err(Error::InvalidArgument(format!("{n} states cannot be split into {ns} chains")));
    }
    if let Some(i) = seed_g.iter().position(|v| !(*v <= b)) {
        return Err(Error::InvalidArgument(format!(
            "seed {i} has g = {} above the threshold {b}",
            seed_g[i]
        )));
    }
    let mut states = seeds.to_vec();
    let mut gs = seed_g.to_vec();
    let mut lq = seed_ln_q.to_vec();
    let mut samples = Vec::with_capacity(n);
    let mut g_values = Vec::with_capacity(n);
    let mut ln_q = Vec::with_capacity(n);
    samples.extend(states.iter().cloned());
    g_values.extend_from_slice(&gs);
    ln_q.extend_from_slice(&lq);

    let steps = n / ns - 1;
    let (first, second) = halves(ns);
    let mut accepted = 0usize;
    let mut evaluations = 0u64;
    for _ in 0..steps {
        for (active, complement) in [(first.clone(), second.clone()), (second.clone(), first.clone())] {
            let proposals = propose_half(&states, active, complement, a, rng);
            let mut screened = Vec::new();
            let mut screened_lq = Vec::new();
            for p in proposals {
                let lp = density.ln_pdf(&p.point);
                if p.accepts(lq[p.walker], lp) {
                    screened_lq.push(lp);
                    screened.push(p);
                }
            }
            let points: Vec<Vec<f64>> = screened.iter().map(|p| p.point.clone()).collect();
            let responses = checked_batch(g, &points)?;
            evaluations += points.len() as u64;
            for ((p, lp), gv) in screened.into_iter().zip(screened_lq).zip(responses) {
                if gv <= b {
                    states[p.walker] = p.point;
                    gs[p.walker] = gv;
                    lq[p.walker] = lp;
                    accepted += 1;
                }
            }
        }
        samples.extend(states.iter().cloned());
        g_values.extend_from_slice(&gs);
        ln_q.extend_from_slice(&lq);
    }
    let proposals = (steps * ns).max(1);
    Ok(ConditionalSamples {
        samples,
        g_values,
        ln_q,
        acceptance_rate: accepted as f64 / proposals as f64,
        g_evaluations: evaluations,
    })
}

/// Run subset simulation of `g` under `density`.
///
/// Stops when at least `p0·N` samples of a level fail (the threshold is then
/// 0 and that level's fraction is `#{g ≤ 0}/N`). A run that reaches
/// `max_levels`, or whose threshold stops decreasing, is returned with
/// `converged = false`.
pub fn run_sus<P>(g: &P, density: SamplingDensity, cfg: &SusConfig) -> Result<SusRun>
where
    P: PerformanceFunction + ?Sized,
{
    cfg.validate()?;
    let n = cfg.samples_per_level;
    let ns = cfg.seeds_per_level()?;

    let mut rng = cfg.seed.stream("sus-level", &[0]);
    let samples: Vec<Vec<f64>> = (0..n).map(|_| density.sample(&mut rng)).collect();
    let ln_q: Vec<f64> = samples.par_iter().map(|x| density.ln_pdf(x)).collect();
    let g_values = checked_batch(g, &samples)?;
    let mut g_evaluations = n as u64;

    let mut levels = Vec::new();
    let mut current = ConditionalSamples {
        samples,
        g_values,
        ln_q,
        acceptance_rate: 1.0,
        g_evaluations: n as u64,
    };
    let mut conditioning = f64::INFINITY;
    let mut chains = 0;
    let mut converged = false;
    loop {
        let index = levels.len() + 1;
        let failures = current.g_values.iter().filter(|v| **v <= 0.0).count();
        let (threshold, seeds, last) = if failures >= ns {
            converged = true;
            (0.0, smallest_indices(&current.g_values, ns), true)
        } else {
            let (b, seeds) = level_threshold(&current.g_values, cfg.p0)?;
            if b >= conditioning {
                warn!("subset simulation stalled at level {index}: threshold {b} did not decrease");
            } else if index >= cfg.max_levels {
                warn!("subset simulation reached {} levels without converging (b = {b})", cfg.max_levels);
            }
            (b, seeds, index >= cfg.max_levels || b >= conditioning)
        };
        let count_below = current.g_values.iter().filter(|v| **v <= threshold).count();
        debug!("level {index}: b = {threshold}, {count_below}/{n} below");
        levels.push(Level {
            index,
            conditioning,
            threshold,
            samples: current.samples,
            g_values: current.g_values,
            ln_q: current.ln_q,
            seed_indices: seeds,
            count_below,
            chains,
            acceptance_rate: current.acceptance_rate,
        });
        if last {
            break;
        }
        let level = levels.last().expect("level just pushed");
        let seed_states: Vec<Vec<f64>> = level.seed_indices.iter().map(|&i| level.samples[i].clone()).collect();
        let seed_g: Vec<f64> = level.seed_indices.iter().map(|&i| level.g_values[i]).collect();
        let seed_lq: Vec<f64> = level.seed_indices.iter().map(|&i| level.ln_q[i]).collect();
        let mut rng = cfg.seed.stream("sus-level", &[index as u64]);
        current = conditional_mcmc(
            &seed_states,
            &seed_g,
            &seed_lq,
            &density,
            g,
            threshold,
            n,
            cfg.stretch_scale,
            &mut rng,
        )?;
        g_evaluations += current.g_evaluations;
        conditioning = threshold;
        chains = ns;
    }

    let pf_baseline = levels.iter().map(Level::fraction).product();
    let retained_samples = levels.iter().map(|l| l.len() as u64).sum();
    let mut run = SusRun {
        config: cfg.clone(),
        density,
        levels,
        pf_baseline,
        cov_baseline: 0.0,
        g_evaluations,
        retained_samples,
        converged,
    };
    run.cov_baseline = cov_estimate(&run);
    Ok(run)
}

/// Chain-correlation factor `γ` of one level's indicator sequence.
///
/// States are step-major across `chains` chains of equal length. Returns 0
/// for independent (level-1) samples.
pub fn chain_correlation(indicators: &[bool], chains: usize) -> f64 {
    let n = indicators.len();
    if chains == 0 || n == 0 || n % chains != 0 {
        return 0.0;
    }
    let len = n / chains;
    if len < 2 {
        return 0.0;
    }
    let p = indicators.iter().filter(|v| **v).count() as f64 / n as f64;
    let r0 = p * (1.0 - p);
    if r0 <= 0.0 {
        return 0.0;
    }
    let at = |chain: usize, t: usize| indicators[t * chains + chain];
    let mut gamma = 0.0;
    for k in 1..len {
        let mut acc = 0.0;
        for c in 0..chains {
            for t in 0..len - k {
                if at(c, t) && at(c, t + k) {
                    acc += 1.0;
                }
            }
        }
        let rk = acc / (n - k * chains) as f64 - p * p;
        gamma += 2.0 * (1.0 - k as f64 / len as f64) * rk / r0;
    }
    gamma
}

/// Coefficient of variation of `pf_baseline`:
/// `δ² = Σ_i (1 − P_i)/(P_i N)·(1 + γ_i)`.
pub fn cov_estimate(run: &SusRun) -> f64 {
    let mut total = 0.0;
    for level in &run.levels {
        let p = level.fraction();
        if p <= 0.0 {
            return f64::INFINITY;
        }
        if p >= 1.0 {
            continue;
        }
        let indicators: Vec<bool> = level.g_values.iter().map(|v| *v <= level.threshold).collect();
        let gamma = chain_correlation(&indicators, level.chains);
        total += ((1.0 - p) / (p * level.len() as f64) * (1.0 + gamma)).max(0.0);
    }
    total.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{JointDensity, MixtureDensity};
    use crate::distributions::DistributionSpec;
    use crate::special::std_normal_cdf;

    fn std_normal_joint(d: usize) -> SamplingDensity {
        JointDensity::new(
            (0..d)
                .map(|i| MixtureDensity::single(format!("u{i}"), DistributionSpec::normal(0.0, 1.0).unwrap()).unwrap())
                .collect(),
        )
        .unwrap()
        .into()
    }

    fn linear(beta: f64) -> LimitStateFn<impl Fn(&[f64]) -> f64 + Sync> {
        LimitStateFn(move |u: &[f64]| beta * std::f64::consts::SQRT_2 - u.iter().sum::<f64>())
    }

    #[test]
    fn threshold_examples() {
        let g: Vec<f64> = (1..=10).map(f64::from).collect();
        let (b, seeds) = level_threshold(&g, 0.1).unwrap();
        assert_eq!(b, 1.5);
        assert_eq!(seeds, vec![0]);

        let g: Vec<f64> = (1..=10).rev().map(f64::from).collect();
        let (b, seeds) = level_threshold(&g, 0.2).unwrap();
        assert_eq!(b, 2.5);
        assert_eq!(seeds, vec![9, 8]);

        assert!(matches!(level_threshold(&[3.0; 10], 0.2), Err(Error::DegenerateThreshold(_))));
    }

    #[test]
    fn ties_are_broken_by_index() {
        let g = [2.0, 1.0, 1.0, 1.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
        let (b, seeds) = level_threshold(&g, 0.2).unwrap();
        assert_eq!(b, 1.0);
        assert_eq!(seeds, vec![1, 2]);
    }

    #[test]
    fn config_validation() {
        let ok = SusConfig::default();
        assert_eq!(ok.seeds_per_level().unwrap(), 100);
        let bad = SusConfig { samples_per_level: 15, ..ok.clone() };
        assert!(bad.validate().is_err());
        let too_few = SusConfig { samples_per_level: 10, ..ok.clone() };
        assert!(too_few.validate().is_err());
        let no_levels = SusConfig { max_levels: 0, ..ok };
        assert!(no_levels.validate().is_err());
    }

    #[test]
    fn always_failed_is_one_level() {
        let g = LimitStateFn(|_: &[f64]| -1.0);
        let run = run_sus(&g, std_normal_joint(2), &SusConfig::default()).unwrap();
        assert_eq!(run.n_levels(), 1);
        assert_eq!(run.pf_baseline, 1.0);
        assert!(run.converged);
        assert_eq!(run.cov_baseline, 0.0);
    }

    #[test]
    fn linear_problem_single_run() {
        let cfg = SusConfig {
            seed: MasterSeed(11),
            ..Default::default()
        };
        let run = run_sus(&linear(3.0), std_normal_joint(2), &cfg).unwrap();
        let exact = std_normal_cdf(-3.0);
        assert!(run.converged);
        assert!(run.pf_baseline > exact / 3.0 && run.pf_baseline < exact * 3.0, "{}", run.pf_baseline);

        let ns = cfg.seeds_per_level().unwrap();
        let mut prev = f64::INFINITY;
        for level in &run.levels {
            assert_eq!(level.len(), cfg.samples_per_level);
            assert_eq!(level.seed_indices.len(), ns);
            assert!(level.threshold < prev);
            assert!(level.g_values.iter().all(|g| *g <= level.conditioning));
            prev = level.threshold;
        }
        let m = run.n_levels();
        let identity = cfg.p0.powi(m as i32 - 1) * run.levels[m - 1].fraction();
        assert_eq!(run.pf_baseline, identity);
        let n = cfg.samples_per_level as u64;
        assert!(run.g_evaluations > n);
        assert!(run.g_evaluations <= n + (m as u64 - 1) * (n - ns as u64));
        assert_eq!(run.retained_samples, m as u64 * n);
    }

    #[test]
    fn reproducible() {
        let cfg = SusConfig {
            seed: MasterSeed(5),
            ..Default::default()
        };
        let a = run_sus(&linear(3.0), std_normal_joint(2), &cfg).unwrap();
        let b = run_sus(&linear(3.0), std_normal_joint(2), &cfg).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn max_levels_flags_non_convergence() {
        let cfg = SusConfig {
            max_levels: 2,
            ..Default::default()
        };
        let run = run_sus(&linear(5.0), std_normal_joint(2), &cfg).unwrap();
        assert!(!run.converged);
        assert_eq!(run.n_levels(), 2);
        assert!(run.levels[1].threshold > 0.0);
    }

    #[test]
    fn non_finite_response_is_an_error() {
        let g = LimitStateFn(|u: &[f64]| if u[0] > 1.0 { f64::NAN } else { 1.0 - u[0] });
        assert!(matches!(
            run_sus(&g, std_normal_joint(1), &SusConfig::default()),
            Err(Error::NonFiniteResponse { .. })
        ));
    }

    #[test]
    fn unconstrained_chains_recover_density() {
        let q = std_normal_joint(2);
        let mut rng = MasterSeed(3).stream("test", &[]);
        let seeds: Vec<Vec<f64>> = (0..100).map(|_| q.sample(&mut rng)).collect();
        let seed_lq: Vec<f64> = seeds.iter().map(|s| q.ln_pdf(s)).collect();
        let g = LimitStateFn(|u: &[f64]| u[0]);
        let seed_g: Vec<f64> = seeds.iter().map(|s| s[0]).collect();
        let out = conditional_mcmc(&seeds, &seed_g, &seed_lq, &q, &g, f64::INFINITY, 10_000, 2.0, &mut rng).unwrap();
        assert_eq!(out.samples.len(), 10_000);
        for d in 0..2 {
            let mean = out.samples.iter().map(|s| s[d]).sum::<f64>() / 1e4;
            let var = out.samples.iter().map(|s| (s[d] - mean).powi(2)).sum::<f64>() / 1e4;
            assert!(mean.abs() < 0.1, "{mean}");
            assert!((var - 1.0).abs() < 0.05 * 2.0, "{var}");
        }
    }

    #[test]
    fn total_rejection_returns_seed_copies() {
        let q = std_normal_joint(2);
        let seeds = vec![vec![3.0, 3.0], vec![3.5, 2.5], vec![2.9, 3.2], vec![3.1, 3.3]];
        let seed_lq: Vec<f64> = seeds.iter().map(|s| q.ln_pdf(s)).collect();
        // only the seeds' exact coordinates satisfy the constraint
        let g = LimitStateFn(|u: &[f64]| if seeds_contains(u) { -1.0 } else { 1.0 });
        fn seeds_contains(u: &[f64]) -> bool {
            [[3.0, 3.0], [3.5, 2.5], [2.9, 3.2], [3.1, 3.3]].iter().any(|s| s[0] == u[0] && s[1] == u[1])
        }
        let seed_g = vec![-1.0; 4];
        let mut rng = MasterSeed(3).stream("test", &[]);
        let out = conditional_mcmc(&seeds, &seed_g, &seed_lq, &q, &g, 0.0, 40, 2.0, &mut rng).unwrap();
        assert_eq!(out.acceptance_rate, 0.0);
        for (i, s) in out.samples.iter().enumerate() {
            assert_eq!(s, &seeds[i % 4]);
        }
        assert!(out.g_values.iter().all(|g| *g <= 0.0));

        let too_small = conditional_mcmc(&seeds[..1], &seed_g[..1], &seed_lq[..1], &q, &g, 0.0, 10, 2.0, &mut rng);
        assert!(matches!(too_small, Err(Error::EnsembleTooSmall { .. })));
    }

    #[test]
    fn cov_examples() {
        let level = |count: usize, n: usize| Level {
            index: 1,
            conditioning: f64::INFINITY,
            threshold: 0.0,
            samples: vec![vec![0.0]; n],
            g_values: (0..n).map(|i| if i < count { -1.0 } else { 1.0 }).collect(),
            ln_q: vec![0.0; n],
            seed_indices: vec![],
            count_below: count,
            chains: 0,
            acceptance_rate: 1.0,
        };
        let mut run = SusRun {
            config: SusConfig::default(),
            density: std_normal_joint(1),
            levels: vec![level(500, 1000)],
            pf_baseline: 0.5,
            cov_baseline: 0.0,
            g_evaluations: 1000,
            retained_samples: 1000,
            converged: true,
        };
        assert!((cov_estimate(&run) - 0.031_622_776_601_683_79).abs() < 1e-12);
        run.levels = vec![level(1000, 1000)];
        assert_eq!(cov_estimate(&run), 0.0);
    }

    #[test]
    fn correlation_of_constant_chains() {
        // each chain repeats its seed: indicator is perfectly correlated along the chain
        let chains = 10;
        let len = 10;
        let indicators: Vec<bool> = (0..chains * len).map(|i| (i % chains) < 5).collect();
        let gamma = chain_correlation(&indicators, chains);
        // Σ 2(1 − k/L) for k = 1..L−1 equals L − 1
        assert!((gamma - (len as f64 - 1.0)).abs() < 1e-12, "{gamma}");
    }
}

//! Validation baselines: one independent subset simulation per candidate,
//! and ECDF comparison.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::SamplingDensity;
use crate::error::{Error, Result};
use crate::inference::CandidateModel;
use crate::reweight::FailureDistribution;
use crate::stats::{ks_two_sample, Ecdf};
use crate::sus::{run_sus, PerformanceFunction, SusConfig};

/// Default limit on the number of candidates an oracle run accepts.
pub const DEFAULT_CANDIDATE_CAP: usize = 100;

/// Wraps a performance function and counts every evaluated point.
pub struct CountingFunction<P> {
    inner: P,
    calls: AtomicU64,
}

impl<P> CountingFunction<P> {
    pub fn new(inner: P) -> Self {
        CountingFunction {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }
}

impl<P: PerformanceFunction> PerformanceFunction for CountingFunction<P> {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.evaluate(x)
    }

    fn evaluate_batch(&self, xs: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.calls.fetch_add(xs.len() as u64, Ordering::Relaxed);
        self.inner.evaluate_batch(xs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleMethod {
    RepeatedSus,
    PlainMc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub method: OracleMethod,
    /// One failure probability per candidate, in candidate order.
    pub values: Vec<f64>,
    pub per_run_evaluations: Vec<u64>,
    pub converged: Vec<bool>,
    /// Instrumented total over all runs.
    pub g_evaluations: u64,
    /// Not serialized, so reports stay byte-reproducible.
    #[serde(skip)]
    pub wall_clock: Duration,
}

impl OracleReport {
    pub fn distribution(&self) -> Result<FailureDistribution> {
        FailureDistribution::from_values(self.values.clone())
    }
}

/// Check a candidate count against the cap.
pub fn check_cap(count: usize, cap: usize) -> Result<()> {
    if cap == 0 {
        return Err(Error::InvalidArgument(
            "candidate cap is 0: the oracle runs one subset simulation per candidate and needs a positive cap".into(),
        ));
    }
    if count > cap {
        return Err(Error::InvalidArgument(format!(
            "{count} candidates exceed the oracle cap of {cap}; raise the cap explicitly to proceed"
        )));
    }
    Ok(())
}

/// Run an independent subset simulation for every candidate, each sampling
/// from the candidate's own joint density with seed
/// `cfg.seed.child("oracle", [j])`.
pub fn repeated_sus<P>(g: &P, candidates: &[CandidateModel], cfg: &SusConfig, cap: usize) -> Result<OracleReport>
where
    P: PerformanceFunction,
{
    if candidates.is_empty() {
        return Err(Error::EmptyInput("candidates"));
    }
    check_cap(candidates.len(), cap)?;
    cfg.validate()?;
    let start = Instant::now();
    let counter = CountingFunction::new(g);
    let runs = candidates
        .par_iter()
        .enumerate()
        .map(|(j, c)| {
            let run_cfg = SusConfig {
                seed: cfg.seed.child("oracle", &[j as u64]),
                ..cfg.clone()
            };
            let run = run_sus(&counter, SamplingDensity::Candidate(c.clone()), &run_cfg)?;
            Ok((run.pf_baseline, run.g_evaluations, run.converged))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OracleReport {
        method: OracleMethod::RepeatedSus,
        values: runs.iter().map(|r| r.0).collect(),
        per_run_evaluations: runs.iter().map(|r| r.1).collect(),
        converged: runs.iter().map(|r| r.2).collect(),
        g_evaluations: counter.calls(),
        wall_clock: start.elapsed(),
    })
}

/// Divergence between two failure-probability distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EcdfComparison {
    pub median_a: f64,
    pub median_b: f64,
    /// `log10(median_a) − log10(median_b)`.
    pub log10_median_diff: f64,
    pub ks: f64,
    pub q05: [f64; 2],
    pub q95: [f64; 2],
    /// `(q95 − q05)` of `a` over that of `b`.
    pub width_ratio: f64,
    /// Length of the intersection of the two 90% bands over the length of
    /// their union.
    pub band_overlap: f64,
}

pub fn compare_ecdf(a: &Ecdf, b: &Ecdf) -> EcdfComparison {
    let (ma, mb) = (a.median(), b.median());
    let (a05, a95, b05, b95) = (a.quantile(0.05), a.quantile(0.95), b.quantile(0.05), b.quantile(0.95));
    let inter = (a95.min(b95) - a05.max(b05)).max(0.0);
    let union = a95.max(b95) - a05.min(b05);
    let band_overlap = if union > 0.0 {
        inter / union
    } else if a05 == b05 {
        1.0
    } else {
        0.0
    };
    EcdfComparison {
        median_a: ma,
        median_b: mb,
        log10_median_diff: ma.log10() - mb.log10(),
        ks: ks_two_sample(a, b),
        q05: [a05, b05],
        q95: [a95, b95],
        width_ratio: (a95 - a05) / (b95 - b05),
        band_overlap,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::DistributionSpec;
    use crate::rng::MasterSeed;
    use crate::sus::LimitStateFn;

    #[test]
    fn comparison_examples() {
        let a = Ecdf::new(&[1e-3, 2e-3, 3e-3]).unwrap();
        let same = compare_ecdf(&a, &a);
        assert_eq!(same.ks, 0.0);
        assert_eq!(same.log10_median_diff, 0.0);
        assert_eq!(same.band_overlap, 1.0);

        let far = Ecdf::new(&[1.0, 2.0]).unwrap();
        assert_eq!(compare_ecdf(&a, &far).ks, 1.0);
        assert_eq!(compare_ecdf(&a, &far).band_overlap, 0.0);

        let shifted = Ecdf::new(&[1e-2, 2e-2, 3e-2]).unwrap();
        assert!((compare_ecdf(&shifted, &a).log10_median_diff - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cap_is_enforced() {
        assert!(check_cap(1, 0).is_err());
        assert!(check_cap(101, 100).is_err());
        assert!(check_cap(100, 100).is_ok());
    }

    #[test]
    fn counters_are_exact() {
        let g = LimitStateFn(|u: &[f64]| 2.5 * std::f64::consts::SQRT_2 - u[0] - u[1]);
        let cands: Vec<CandidateModel> = [1.0, 1.1, 0.9]
            .iter()
            .map(|s| CandidateModel::new(vec![DistributionSpec::normal(0.0, *s).unwrap(); 2]).unwrap())
            .collect();
        let cfg = SusConfig {
            seed: MasterSeed(2),
            ..Default::default()
        };
        let report = repeated_sus(&g, &cands, &cfg, 100).unwrap();
        assert_eq!(report.values.len(), 3);
        assert_eq!(report.g_evaluations, report.per_run_evaluations.iter().sum::<u64>());
        assert!(report.values[1] > report.values[2]);
        assert!(repeated_sus(&g, &cands, &cfg, 2).is_err());
    }
}

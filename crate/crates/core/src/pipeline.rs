//! End-to-end imprecise subset simulation: fit pools, build the optimal
//! sampling density, run one subset simulation, draw candidates and
//! re-weight.

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{optimal_marginal, JointDensity, SamplingDensity, DEFAULT_N_MIX};
use crate::distributions::Dataset;
use crate::error::{Error, Result};
use crate::inference::{build_pool, draw_candidates, CandidateModel, InferenceConfig, ModelPool};
use crate::reweight::{reweight_all, FailureDistribution, WeightMode};
use crate::rng::MasterSeed;
use crate::sus::{run_sus, PerformanceFunction, SusConfig, SusRun};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsusConfig {
    pub seed: MasterSeed,
    pub inference: InferenceConfig,
    pub n_mix: usize,
    pub n_c: usize,
    /// Subset simulation settings; the seed field is replaced by one derived
    /// from the master seed.
    pub sus: SusConfig,
    pub weight_mode: WeightMode,
}

impl Default for IsusConfig {
    fn default() -> Self {
        IsusConfig {
            seed: MasterSeed(0),
            inference: InferenceConfig::default(),
            n_mix: DEFAULT_N_MIX,
            n_c: 1000,
            sus: SusConfig::default(),
            weight_mode: WeightMode::default(),
        }
    }
}

impl IsusConfig {
    pub fn validate(&self) -> Result<()> {
        self.inference.validate()?;
        self.sus.validate()?;
        if self.n_mix == 0 || self.n_c == 0 {
            return Err(Error::InvalidArgument("n_mix and n_c must be positive".into()));
        }
        Ok(())
    }

    /// The subset simulation settings with the derived seed.
    pub fn sus_config(&self) -> SusConfig {
        SusConfig {
            seed: self.seed.child("sus", &[]),
            ..self.sus.clone()
        }
    }
}

/// Draw one dataset of size `n` per variable from `truth`.
pub fn synthetic_datasets(truth: &CandidateModel, names: &[String], n: usize, seed: MasterSeed) -> Result<Vec<Dataset>> {
    truth
        .specs
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let mut rng = seed.stream("data", &[i as u64]);
            let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
            Dataset::new(name, spec.sample(n, &mut rng)?)
        })
        .collect()
}

/// Model pools for every dataset, variables in parallel.
pub fn fit_pools(datasets: &[Dataset], cfg: &InferenceConfig, seed: MasterSeed) -> Result<Vec<ModelPool>> {
    if datasets.is_empty() {
        return Err(Error::EmptyInput("datasets"));
    }
    datasets
        .par_iter()
        .enumerate()
        .map(|(i, d)| build_pool(d, cfg, seed, i))
        .collect()
}

/// Product of the per-variable optimal mixtures.
pub fn optimal_density(pools: &[ModelPool], n_mix: usize, seed: MasterSeed) -> Result<JointDensity> {
    let marginals = pools
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut rng = seed.stream("mixture", &[i as u64]);
            optimal_marginal(p, n_mix, &mut rng)
        })
        .collect::<Result<_>>()?;
    JointDensity::new(marginals)
}

/// Equally weighted candidate models.
pub fn candidate_set(pools: &[ModelPool], n_c: usize, seed: MasterSeed) -> Result<Vec<CandidateModel>> {
    let mut rng = seed.stream("candidates", &[]);
    draw_candidates(pools, n_c, &mut rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsusResult {
    pub density: JointDensity,
    pub candidates: Vec<CandidateModel>,
    pub run: SusRun,
    pub distribution: FailureDistribution,
}

/// Optimal density, one subset simulation, candidate draw and re-weighting.
pub fn run_isus<P>(g: &P, pools: &[ModelPool], cfg: &IsusConfig) -> Result<IsusResult>
where
    P: PerformanceFunction + ?Sized,
{
    cfg.validate()?;
    let density = optimal_density(pools, cfg.n_mix, cfg.seed)?;
    info!(
        "optimal density: {} components",
        density.marginals.iter().map(|m| m.len().to_string()).collect::<Vec<_>>().join(" x ")
    );
    let run = run_sus(g, SamplingDensity::Mixture(density.clone()), &cfg.sus_config())?;
    info!(
        "subset simulation: {} levels, pf = {:.4e}, {} g evaluations",
        run.n_levels(),
        run.pf_baseline,
        run.g_evaluations
    );
    let candidates = candidate_set(pools, cfg.n_c, cfg.seed)?;
    let distribution = reweight_all(&run, &candidates, cfg.weight_mode)?;
    Ok(IsusResult {
        density,
        candidates,
        run,
        distribution,
    })
}

//! Multimodel selection per variable, posterior clouds, and the Monte Carlo
//! draw of candidate models.

use log::warn;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::criteria::{aic, aicc, criterion_deltas, model_probabilities};
use super::ensemble::{stretch_sample, StretchSettings};
use super::posterior::{LogLikelihood, PriorBox, PriorSpec};
use crate::distributions::{fit_mle, Dataset, DistributionSpec, FamilyTag};
use crate::error::{Error, Result};
use crate::rng::MasterSeed;

/// Knobs of the inference stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InferenceConfig {
    pub families: Vec<FamilyTag>,
    /// Posterior draws kept per family.
    pub n_theta: usize,
    /// Families below this model probability get no posterior cloud.
    pub drop_below: f64,
    /// Prior box half-width factor.
    pub prior_width: f64,
    pub stretch_scale: f64,
    /// Thinning interval of the posterior chains.
    pub thin: usize,
}

impl Default for InferenceConfig {
    fn default() -> Self {
        InferenceConfig {
            families: FamilyTag::ALL.to_vec(),
            n_theta: 10_000,
            drop_below: 1e-3,
            prior_width: 5.0,
            stretch_scale: 2.0,
            thin: 5,
        }
    }
}

impl InferenceConfig {
    pub fn validate(&self) -> Result<()> {
        if self.families.is_empty() {
            return Err(Error::EmptyInput("family list"));
        }
        if self.n_theta == 0 {
            return Err(Error::InvalidArgument("n_theta must be positive".into()));
        }
        if !(self.prior_width > 1.0) || !(self.stretch_scale > 1.0) || self.thin == 0 {
            return Err(Error::InvalidArgument(
                "prior width and stretch scale must exceed 1, thinning must be positive".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.drop_below) {
            return Err(Error::InvalidArgument("drop threshold must be in [0, 1)".into()));
        }
        Ok(())
    }
}

/// One family fitted to the data, ranked by AICc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FittedModel {
    pub family: FamilyTag,
    pub theta_star: Vec<f64>,
    pub loglik: f64,
    pub aic: f64,
    /// AICc, or plain AIC when the pool fell back to it.
    pub aicc: f64,
    pub delta: f64,
    pub prob: f64,
}

impl FittedModel {
    pub fn spec(&self) -> DistributionSpec {
        DistributionSpec {
            family: self.family,
            theta: self.theta_star.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedFamily {
    pub family: FamilyTag,
    pub reason: String,
}

/// Posterior parameter draws for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorCloud {
    pub family: FamilyTag,
    pub prior: PriorBox,
    pub samples: Vec<Vec<f64>>,
    pub acceptance_rate: f64,
    pub burn_in: usize,
    pub steps: usize,
    pub walkers: usize,
}

/// Result of multimodel inference for one input variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelPool {
    pub variable: String,
    pub n: usize,
    /// True when every family failed the AICc domain and plain AIC was used.
    pub aic_fallback: bool,
    /// Feasible families, sorted by ascending criterion value.
    pub fitted: Vec<FittedModel>,
    pub skipped: Vec<SkippedFamily>,
    /// Clouds for the retained families, in `fitted` order.
    pub clouds: Vec<PosteriorCloud>,
}

impl ModelPool {
    pub fn cloud(&self, family: FamilyTag) -> Option<&PosteriorCloud> {
        self.clouds.iter().find(|c| c.family == family)
    }

    pub fn prob(&self, family: FamilyTag) -> f64 {
        self.fitted
            .iter()
            .find(|f| f.family == family)
            .map(|f| f.prob)
            .unwrap_or(0.0)
    }

    /// Retained families with model probabilities renormalized over them.
    pub fn retained(&self) -> Vec<(&FittedModel, &PosteriorCloud, f64)> {
        let kept: Vec<(&FittedModel, &PosteriorCloud)> = self
            .fitted
            .iter()
            .filter_map(|f| self.cloud(f.family).map(|c| (f, c)))
            .collect();
        let total: f64 = kept.iter().map(|(f, _)| f.prob).sum();
        kept.into_iter().map(|(f, c)| (f, c, f.prob / total)).collect()
    }
}

/// Fit every family in `families`, compute AICc and model probabilities.
///
/// Families that cannot be fitted, or whose AICc is undefined for this sample
/// size, are skipped with a warning. If that removes every fitted family the
/// criterion falls back to plain AIC.
pub fn select_models(data: &Dataset, families: &[FamilyTag]) -> Result<(Vec<FittedModel>, Vec<SkippedFamily>, bool)> {
    let n = data.len();
    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for &family in families {
        match fit_mle(family, &data.values) {
            Ok(fit) => fits.push(fit),
            Err(e) => {
                warn!("{}: skipping {family}: {e}", data.name);
                skipped.push(SkippedFamily {
                    family,
                    reason: e.to_string(),
                });
            }
        }
    }
    if fits.is_empty() {
        return Err(Error::FitInfeasible {
            family: families.first().copied().unwrap_or(FamilyTag::Normal),
            reason: format!("no candidate family could be fitted to '{}'", data.name),
        });
    }

    let mut scored = Vec::new();
    let mut aicc_skipped = Vec::new();
    for fit in &fits {
        let k = fit.spec.family.n_params();
        match aicc(fit.loglik, k, n) {
            Ok(v) => scored.push((fit, v)),
            Err(e) => aicc_skipped.push(SkippedFamily {
                family: fit.spec.family,
                reason: e.to_string(),
            }),
        }
    }
    let fallback = scored.is_empty();
    if fallback {
        warn!(
            "{}: n = {n} is too small for AICc with any family; falling back to AIC",
            data.name
        );
        scored = fits.iter().map(|f| (f, aic(f.loglik, f.spec.family.n_params()))).collect();
    } else {
        for s in &aicc_skipped {
            warn!("{}: skipping {}: {}", data.name, s.family, s.reason);
        }
        skipped.extend(aicc_skipped);
    }

    let values: Vec<f64> = scored.iter().map(|(_, v)| *v).collect();
    let deltas = criterion_deltas(&values)?;
    let probs = model_probabilities(&values)?;
    let mut fitted: Vec<FittedModel> = scored
        .iter()
        .zip(deltas.iter().zip(&probs))
        .map(|((fit, v), (d, p))| FittedModel {
            family: fit.spec.family,
            theta_star: fit.spec.theta.clone(),
            loglik: fit.loglik,
            aic: aic(fit.loglik, fit.spec.family.n_params()),
            aicc: *v,
            delta: *d,
            prob: *p,
        })
        .collect();
    fitted.sort_by(|a, b| a.aicc.total_cmp(&b.aicc).then(a.family.cmp(&b.family)));
    Ok((fitted, skipped, fallback))
}

/// Default ensemble size for a `d`-dimensional posterior.
pub fn default_walkers(dim: usize) -> usize {
    2 * (2 * dim).max(4)
}

/// Draw `n_theta` posterior samples for `family` with the stretch sampler.
///
/// Walkers start at `theta_star` with 1% relative Gaussian jitter, clipped to
/// the prior box. Half of the steps are burn-in; the rest are thinned by
/// `cfg.thin`.
pub fn posterior_cloud<R: Rng + ?Sized>(
    family: FamilyTag,
    theta_star: &[f64],
    data: &Dataset,
    prior: &PriorSpec,
    cfg: &InferenceConfig,
    rng: &mut R,
) -> Result<PosteriorCloud> {
    if cfg.n_theta == 0 {
        return Err(Error::InvalidArgument("n_theta must be positive".into()));
    }
    let dim = family.n_params();
    let likelihood = LogLikelihood::new(family, &data.values);
    let target = |theta: &[f64]| {
        let lp = prior.ln_density(theta);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        likelihood.eval(theta) + lp
    };

    let walkers = default_walkers(dim);
    let mut init = Vec::with_capacity(walkers);
    for _ in 0..walkers {
        let mut start = None;
        let mut jitter = 0.01;
        for attempt in 0..200 {
            let mut theta: Vec<f64> = theta_star
                .iter()
                .enumerate()
                .map(|(i, t)| {
                    let scale = if *t != 0.0 {
                        t.abs()
                    } else {
                        0.2 * (prior.upper[i] - prior.lower[i])
                    };
                    let z: f64 = StandardNormal.sample(rng);
                    t + jitter * scale * z
                })
                .collect();
            prior.clip(&mut theta);
            if target(&theta).is_finite() {
                start = Some(theta);
                break;
            }
            if attempt % 20 == 19 {
                jitter *= 0.5;
            }
        }
        init.push(start.unwrap_or_else(|| theta_star.to_vec()));
    }

    let per_walker = cfg.n_theta.div_ceil(walkers);
    let post = per_walker * cfg.thin;
    let settings = StretchSettings {
        steps: 2 * post,
        burn_in: post,
        thin: cfg.thin,
        a: cfg.stretch_scale,
    };
    let chain = stretch_sample(target, init, settings, rng)?;
    let mut samples = chain.states;
    samples.truncate(cfg.n_theta);
    Ok(PosteriorCloud {
        family,
        prior: prior.clone(),
        samples,
        acceptance_rate: chain.acceptance_rate,
        burn_in: settings.burn_in,
        steps: settings.steps,
        walkers,
    })
}

/// Full multimodel inference for one variable: model selection, then a
/// posterior cloud for every family with non-negligible probability.
///
/// Clouds run in parallel; each family's stream is derived from
/// `(seed, "posterior", variable_index, family_index)` so the result does not
/// depend on the thread count.
pub fn build_pool(data: &Dataset, cfg: &InferenceConfig, seed: MasterSeed, variable_index: usize) -> Result<ModelPool> {
    cfg.validate()?;
    let (fitted, skipped, aic_fallback) = select_models(data, &cfg.families)?;
    let keep: Vec<&FittedModel> = fitted.iter().filter(|f| f.prob >= cfg.drop_below).collect();
    let clouds = keep
        .par_iter()
        .map(|f| {
            let family_index = FamilyTag::ALL.iter().position(|t| *t == f.family).unwrap_or(0) as u64;
            let mut rng = seed.stream("posterior", &[variable_index as u64, family_index]);
            let fit = crate::distributions::MleFit {
                spec: f.spec(),
                loglik: f.loglik,
            };
            let prior = PriorBox::around_mle(&fit, &data.values, cfg.prior_width)?;
            posterior_cloud(f.family, &f.theta_star, data, &prior, cfg, &mut rng)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModelPool {
        variable: data.name.clone(),
        n: data.len(),
        aic_fallback,
        fitted,
        skipped,
        clouds,
    })
}

/// One concrete joint input distribution: a spec per random variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateModel {
    pub specs: Vec<DistributionSpec>,
}

impl CandidateModel {
    pub fn new(specs: Vec<DistributionSpec>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::EmptyInput("candidate specs"));
        }
        for s in &specs {
            s.validate()?;
        }
        Ok(CandidateModel { specs })
    }

    pub fn dim(&self) -> usize {
        self.specs.len()
    }

    /// Joint log density of independent marginals.
    pub fn ln_pdf(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (spec, &xi) in self.specs.iter().zip(x) {
            let v = spec.ln_pdf(xi);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        total
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.specs.iter().map(|s| s.sample_one(rng)).collect()
    }
}

/// Draw `n_c` equally weighted candidates: per variable pick a family with
/// probability ∝ its (renormalized) model probability, then a parameter
/// vector uniformly, with replacement, from that family's cloud.
pub fn draw_candidates<R: Rng + ?Sized>(pools: &[ModelPool], n_c: usize, rng: &mut R) -> Result<Vec<CandidateModel>> {
    if pools.is_empty() {
        return Err(Error::EmptyInput("model pools"));
    }
    let tables: Vec<Vec<(f64, &PosteriorCloud)>> = pools
        .iter()
        .map(|pool| {
            let retained = pool.retained();
            if retained.is_empty() {
                return Err(Error::EmptyInput("pool without posterior clouds"));
            }
            let mut cumulative = 0.0;
            let mut table = Vec::with_capacity(retained.len());
            for (_, cloud, p) in retained {
                if cloud.samples.is_empty() {
                    return Err(Error::EmptyCloud(cloud.family));
                }
                cumulative += p;
                table.push((cumulative, cloud));
            }
            Ok(table)
        })
        .collect::<Result<_>>()?;

    let mut out = Vec::with_capacity(n_c);
    for _ in 0..n_c {
        let mut specs = Vec::with_capacity(pools.len());
        for table in &tables {
            let u: f64 = rng.random::<f64>() * table.last().map(|t| t.0).unwrap_or(1.0);
            let idx = table.partition_point(|(c, _)| *c <= u).min(table.len() - 1);
            let cloud = table[idx].1;
            let theta = cloud.samples[rng.random_range(0..cloud.samples.len())].clone();
            specs.push(DistributionSpec {
                family: cloud.family,
                theta,
            });
        }
        out.push(CandidateModel { specs });
    }
    Ok(out)
}

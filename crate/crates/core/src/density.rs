//! Optimal sampling densities: per-variable posterior-averaged mixtures and
//! their independent product.

use std::collections::HashMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::DistributionSpec;
use crate::error::{Error, Result};
use crate::inference::{CandidateModel, ModelPool};

/// `ln(1e-300)`: sampling densities below this are treated as zero when used
/// as an importance-sampling denominator.
pub const LN_DENSITY_FLOOR: f64 = -690.775_527_898_213_7;

/// Default number of posterior draws averaged per family.
pub const DEFAULT_N_MIX: usize = 500;

/// A joint density over `dim()` independent coordinates.
pub trait LogDensity: Sync {
    fn dim(&self) -> usize;

    /// Joint log density; `x.len()` must equal `dim()`.
    fn ln_pdf(&self, x: &[f64]) -> f64;
}

/// A density that can also be sampled.
pub trait SampleDensity: LogDensity {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64>;
}

impl LogDensity for CandidateModel {
    fn dim(&self) -> usize {
        self.specs.len()
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        CandidateModel::ln_pdf(self, x)
    }
}

impl SampleDensity for CandidateModel {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        CandidateModel::sample(self, rng)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureComponent {
    pub spec: DistributionSpec,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MixtureDocument {
    variable: String,
    components: Vec<MixtureComponent>,
}

/// A finite mixture of univariate distributions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureDocument", into = "MixtureDocument")]
pub struct MixtureDensity {
    variable: String,
    components: Vec<MixtureComponent>,
    ln_weights: Vec<f64>,
    cumulative: Vec<f64>,
}

impl TryFrom<MixtureDocument> for MixtureDensity {
    type Error = Error;

    fn try_from(doc: MixtureDocument) -> Result<Self> {
        MixtureDensity::new(doc.variable, doc.components)
    }
}

impl From<MixtureDensity> for MixtureDocument {
    fn from(m: MixtureDensity) -> Self {
        MixtureDocument {
            variable: m.variable,
            components: m.components,
        }
    }
}

impl MixtureDensity {
    /// Build a mixture, merging components with bit-identical specs.
    ///
    /// Weights must be positive and sum to 1 within 1e-9; they are
    /// renormalized exactly.
    pub fn new(variable: impl Into<String>, components: Vec<MixtureComponent>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::EmptyInput("mixture components"));
        }
        let mut merged: Vec<MixtureComponent> = Vec::with_capacity(components.len());
        let mut seen: HashMap<(crate::distributions::FamilyTag, Vec<u64>), usize> = HashMap::new();
        for c in components {
            c.spec.validate()?;
            if !(c.weight > 0.0) || !c.weight.is_finite() {
                return Err(Error::InvalidArgument(format!("mixture weight {} is not positive", c.weight)));
            }
            let key = (c.spec.family, c.spec.theta.iter().map(|t| t.to_bits()).collect());
            match seen.get(&key) {
                Some(&i) => merged[i].weight += c.weight,
                None => {
                    seen.insert(key, merged.len());
                    merged.push(c);
                }
            }
        }
        let total: f64 = merged.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!("mixture weights sum to {total}")));
        }
        for c in &mut merged {
            c.weight /= total;
        }
        let ln_weights = merged.iter().map(|c| c.weight.ln()).collect();
        let mut acc = 0.0;
        let cumulative = merged
            .iter()
            .map(|c| {
                acc += c.weight;
                acc
            })
            .collect();
        Ok(MixtureDensity {
            variable: variable.into(),
            components: merged,
            ln_weights,
            cumulative,
        })
    }

    /// A one-component mixture.
    pub fn single(variable: impl Into<String>, spec: DistributionSpec) -> Result<Self> {
        Self::new(variable, vec![MixtureComponent { spec, weight: 1.0 }])
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn components(&self) -> &[MixtureComponent] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// `ln Σ w_c p_c(x)`, accumulated in component order with a running max.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        if self.components.len() == 1 {
            return self.components[0].spec.ln_pdf(x);
        }
        let mut max = f64::NEG_INFINITY;
        let mut sum = 0.0;
        for (c, lw) in self.components.iter().zip(&self.ln_weights) {
            let v = lw + c.spec.ln_pdf(x);
            if v == f64::NEG_INFINITY {
                continue;
            }
            if v > max {
                sum = sum * (max - v).exp() + 1.0;
                max = v;
            } else {
                sum += (v - max).exp();
            }
        }
        if max == f64::NEG_INFINITY {
            max
        } else {
            max + sum.ln()
        }
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.ln_pdf(x).exp()
    }

    /// Index of the component selected by a uniform variate `u` in `[0, 1)`.
    pub fn component_for(&self, u: f64) -> usize {
        let target = u * self.cumulative[self.cumulative.len() - 1];
        self.cumulative
            .partition_point(|c| *c <= target)
            .min(self.components.len() - 1)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let i = self.component_for(rng.random());
        self.components[i].spec.sample_one(rng)
    }
}

/// Build the optimal sampling marginal for one variable: for each family with
/// a posterior cloud, `n_mix` parameter draws (without replacement when the
/// cloud is large enough) each carrying weight `π_l / n_mix`.
pub fn optimal_marginal<R: Rng + ?Sized>(pool: &ModelPool, n_mix: usize, rng: &mut R) -> Result<MixtureDensity> {
    if n_mix == 0 {
        return Err(Error::InvalidArgument("n_mix must be positive".into()));
    }
    let retained = pool.retained();
    if retained.is_empty() {
        return Err(Error::EmptyInput("model pool"));
    }
    let mut components = Vec::new();
    for (_, cloud, prob) in retained {
        let n = cloud.samples.len();
        if n == 0 {
            return Err(Error::EmptyCloud(cloud.family));
        }
        let picks: Vec<usize> = if n <= n_mix {
            (0..n).collect()
        } else {
            let mut v = index::sample(rng, n, n_mix).into_vec();
            v.sort_unstable();
            v
        };
        let w = prob / picks.len() as f64;
        for i in picks {
            components.push(MixtureComponent {
                spec: DistributionSpec {
                    family: cloud.family,
                    theta: cloud.samples[i].clone(),
                },
                weight: w,
            });
        }
    }
    MixtureDensity::new(pool.variable.clone(), components)
}

/// Independent product of mixture marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDensity {
    pub marginals: Vec<MixtureDensity>,
}

impl JointDensity {
    pub fn new(marginals: Vec<MixtureDensity>) -> Result<Self> {
        if marginals.is_empty() {
            return Err(Error::EmptyInput("joint density marginals"));
        }
        Ok(JointDensity { marginals })
    }

    /// Joint density whose marginals are the given candidate's specs.
    pub fn from_candidate(candidate: &CandidateModel, names: &[String]) -> Result<Self> {
        let marginals = candidate
            .specs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                MixtureDensity::single(name, s.clone())
            })
            .collect::<Result<_>>()?;
        Self::new(marginals)
    }

    /// `Σ_α ln q_α(x_α)`, checking the dimension.
    pub fn joint_log_pdf(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.marginals.len() {
            return Err(Error::DimensionMismatch {
                expected: self.marginals.len(),
                got: x.len(),
            });
        }
        Ok(LogDensity::ln_pdf(self, x))
    }

    /// Draw `n` independent points.
    pub fn joint_sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<Vec<f64>> {
        (0..n).map(|_| SampleDensity::sample(self, rng)).collect()
    }
}

impl LogDensity for JointDensity {
    fn dim(&self) -> usize {
        self.marginals.len()
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        let mut total = 0.0;
        for (m, &xi) in self.marginals.iter().zip(x) {
            let v = m.ln_pdf(xi);
            if v == f64::NEG_INFINITY {
                return v;
            }
            total += v;
        }
        total
    }
}

impl SampleDensity for JointDensity {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.marginals.iter().map(|m| m.sample_one(rng)).collect()
    }
}

/// Either a fitted mixture or a single concrete candidate, as used to drive a
/// subset simulation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SamplingDensity {
    Mixture(JointDensity),
    Candidate(CandidateModel),
}

impl LogDensity for SamplingDensity {
    fn dim(&self) -> usize {
        match self {
            SamplingDensity::Mixture(q) => q.dim(),
            SamplingDensity::Candidate(c) => LogDensity::dim(c),
        }
    }

    fn ln_pdf(&self, x: &[f64]) -> f64 {
        match self {
            SamplingDensity::Mixture(q) => LogDensity::ln_pdf(q, x),
            SamplingDensity::Candidate(c) => LogDensity::ln_pdf(c, x),
        }
    }
}

impl SampleDensity for SamplingDensity {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        match self {
            SamplingDensity::Mixture(q) => SampleDensity::sample(q, rng),
            SamplingDensity::Candidate(c) => SampleDensity::sample(c, rng),
        }
    }
}

impl From<JointDensity> for SamplingDensity {
    fn from(q: JointDensity) -> Self {
        SamplingDensity::Mixture(q)
    }
}

impl From<CandidateModel> for SamplingDensity {
    fn from(c: CandidateModel) -> Self {
        SamplingDensity::Candidate(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributions::FamilyTag;
    use crate::inference::{FittedModel, PosteriorCloud, PriorBox};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn normal(m: f64, s: f64) -> DistributionSpec {
        DistributionSpec::normal(m, s).unwrap()
    }

    fn pool(entries: Vec<(FamilyTag, f64, Vec<Vec<f64>>)>) -> ModelPool {
        ModelPool {
            variable: "x".into(),
            n: 100,
            aic_fallback: false,
            fitted: entries
                .iter()
                .map(|(f, p, s)| FittedModel {
                    family: *f,
                    theta_star: s[0].clone(),
                    loglik: 0.0,
                    aic: 0.0,
                    aicc: 0.0,
                    delta: 0.0,
                    prob: *p,
                })
                .collect(),
            skipped: vec![],
            clouds: entries
                .into_iter()
                .map(|(f, _, s)| PosteriorCloud {
                    family: f,
                    prior: PriorBox::new(vec![-100.0, 1e-3], vec![100.0, 100.0]).unwrap(),
                    samples: s,
                    acceptance_rate: 0.5,
                    burn_in: 0,
                    steps: 0,
                    walkers: 0,
                })
                .collect(),
        }
    }

    #[test]
    fn collapsed_cloud_gives_single_component() {
        let p = pool(vec![(FamilyTag::Normal, 1.0, vec![vec![1.0, 2.0]; 800])]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = optimal_marginal(&p, 500, &mut rng).unwrap();
        assert_eq!(q.len(), 1);
        assert_eq!(q.components()[0].weight, 1.0);
        assert_eq!(q.ln_pdf(0.3), normal(1.0, 2.0).ln_pdf(0.3));
    }

    #[test]
    fn family_weights_follow_probabilities() {
        let a: Vec<Vec<f64>> = (0..300).map(|i| vec![i as f64 * 0.01, 1.0]).collect();
        let b: Vec<Vec<f64>> = (0..300).map(|i| vec![i as f64 * 0.01, 2.0]).collect();
        let p = pool(vec![(FamilyTag::Normal, 0.6, a), (FamilyTag::Logistic, 0.4, b)]);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let q = optimal_marginal(&p, 100, &mut rng).unwrap();
        assert_eq!(q.len(), 200);
        let w = |f| q.components().iter().filter(|c| c.spec.family == f).map(|c| c.weight).sum::<f64>();
        assert_relative_eq!(w(FamilyTag::Normal), 0.6, max_relative = 1e-12);
        assert_relative_eq!(w(FamilyTag::Logistic), 0.4, max_relative = 1e-12);
        assert!(optimal_marginal(&p, 0, &mut rng).is_err());
    }

    #[test]
    fn mixture_evaluation() {
        let single = MixtureDensity::single("x", normal(0.5, 1.5)).unwrap();
        assert_eq!(single.ln_pdf(0.1), normal(0.5, 1.5).ln_pdf(0.1));

        let twin = MixtureDensity::new(
            "x",
            vec![
                MixtureComponent { spec: normal(0.0, 1.0), weight: 0.5 },
                MixtureComponent { spec: normal(0.0, 1.0), weight: 0.5 },
            ],
        )
        .unwrap();
        for x in [-3.0, 0.0, 2.5] {
            assert_relative_eq!(twin.ln_pdf(x), normal(0.0, 1.0).ln_pdf(x), max_relative = 1e-12);
        }

        let positive = MixtureDensity::new(
            "x",
            vec![
                MixtureComponent { spec: DistributionSpec::lognormal(0.0, 1.0).unwrap(), weight: 0.3 },
                MixtureComponent { spec: DistributionSpec::new(FamilyTag::Gamma, vec![2.0, 1.0]).unwrap(), weight: 0.7 },
            ],
        )
        .unwrap();
        assert_eq!(positive.ln_pdf(-1.0), f64::NEG_INFINITY);
        let direct = (0.3 * positive.components()[0].spec.pdf(1.3) + 0.7 * positive.components()[1].spec.pdf(1.3)).ln();
        assert_relative_eq!(positive.ln_pdf(1.3), direct, max_relative = 1e-13);
    }

    #[test]
    fn far_tail_is_stable() {
        let m = MixtureDensity::new(
            "x",
            vec![
                MixtureComponent { spec: normal(0.0, 1.0), weight: 0.5 },
                MixtureComponent { spec: normal(0.0, 2.0), weight: 0.5 },
            ],
        )
        .unwrap();
        let x = 80.0;
        let expected = 0.5f64.ln() + normal(0.0, 2.0).ln_pdf(x);
        assert!(m.ln_pdf(x).is_finite());
        assert_relative_eq!(m.ln_pdf(x), expected, max_relative = 1e-12);
    }

    #[test]
    fn invalid_mixtures() {
        assert!(MixtureDensity::new("x", vec![]).is_err());
        let bad = vec![MixtureComponent { spec: normal(0.0, 1.0), weight: 0.5 }];
        assert!(MixtureDensity::new("x", bad).is_err());
        let neg = vec![
            MixtureComponent { spec: normal(0.0, 1.0), weight: 1.5 },
            MixtureComponent { spec: normal(1.0, 1.0), weight: -0.5 },
        ];
        assert!(MixtureDensity::new("x", neg).is_err());
    }

    #[test]
    fn joint_density() {
        let q = JointDensity::new(vec![
            MixtureDensity::single("a", normal(0.0, 1.0)).unwrap(),
            MixtureDensity::single("b", normal(0.0, 1.0)).unwrap(),
        ])
        .unwrap();
        assert_relative_eq!(q.joint_log_pdf(&[0.0, 0.0]).unwrap(), -2.0 * 0.918_938_533_204_672_7, max_relative = 1e-14);
        assert_eq!(
            q.joint_log_pdf(&[0.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        );
        let one = JointDensity::new(vec![MixtureDensity::single("a", normal(1.0, 3.0)).unwrap()]).unwrap();
        assert_eq!(one.joint_log_pdf(&[0.4]).unwrap(), one.marginals[0].ln_pdf(0.4));

        let positive = JointDensity::new(vec![
            MixtureDensity::single("a", normal(0.0, 1.0)).unwrap(),
            MixtureDensity::single("b", DistributionSpec::lognormal(0.0, 1.0).unwrap()).unwrap(),
        ])
        .unwrap();
        assert_eq!(positive.joint_log_pdf(&[0.0, -1.0]).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn joint_sampling() {
        let m = MixtureDensity::new(
            "x",
            vec![
                MixtureComponent { spec: normal(-50.0, 1.0), weight: 0.6 },
                MixtureComponent { spec: normal(50.0, 1.0), weight: 0.4 },
            ],
        )
        .unwrap();
        let q = JointDensity::new(vec![m]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 100_000;
        let xs = q.joint_sample(n, &mut rng);
        let left = xs.iter().filter(|x| x[0] < 0.0).count() as f64;
        let sd = (n as f64 * 0.6 * 0.4).sqrt();
        assert!((left - 0.6 * n as f64).abs() < 3.0 * sd, "{left}");
        assert!(q.joint_sample(0, &mut rng).is_empty());

        let mut r1 = ChaCha8Rng::seed_from_u64(9);
        let mut r2 = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(q.joint_sample(10, &mut r1), q.joint_sample(10, &mut r2));
    }

    #[test]
    fn candidate_components_keep_absolute_continuity() {
        let specs = [normal(1.0, 0.5), DistributionSpec::lognormal(0.2, 0.3).unwrap()];
        let q = MixtureDensity::new(
            "x",
            specs.iter().map(|s| MixtureComponent { spec: s.clone(), weight: 0.5 }).collect(),
        )
        .unwrap();
        for i in 0..200 {
            let x = -5.0 + i as f64 * 0.05;
            for s in &specs {
                if s.ln_pdf(x).is_finite() {
                    assert!(q.ln_pdf(x).is_finite());
                }
            }
        }
    }

    #[test]
    fn serde_round_trip_rebuilds_caches() {
        let m = MixtureDensity::new(
            "x",
            vec![
                MixtureComponent { spec: normal(0.0, 1.0), weight: 0.25 },
                MixtureComponent { spec: normal(1.0, 2.0), weight: 0.75 },
            ],
        )
        .unwrap();
        let q = JointDensity::new(vec![m]).unwrap();
        let text = serde_json::to_string(&q).unwrap();
        let back: JointDensity = serde_json::from_str(&text).unwrap();
        assert_eq!(back, q);
        assert!(serde_json::from_str::<JointDensity>(r#"{"marginals":[{"variable":"x","components":[]}]}"#).is_err());
    }
}

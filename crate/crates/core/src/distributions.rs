//! The candidate probability families: evaluation, sampling and
//! maximum-likelihood fitting.
//!
//! Every family has two parameters:
//!
//! | family            | θ₀                    | θ₁                 | support   |
//! |-------------------|-----------------------|--------------------|-----------|
//! | `Normal`          | mean                  | std                | ℝ         |
//! | `Lognormal`       | mean of `ln x`        | std of `ln x`      | x > 0     |
//! | `Gamma`           | shape                 | scale              | x > 0     |
//! | `Logistic`        | location              | scale              | ℝ         |
//! | `InverseGaussian` | mean                  | shape (λ)          | x > 0     |
//! | `Maxwell`         | location              | scale              | x > loc   |
//! | `Levy`            | location              | scale              | x > loc   |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::distr::{Distribution, Open01};
use rand::Rng;
use rand_distr::{Gamma, InverseGaussian, LogNormal, Normal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::optimize::NelderMead;
use crate::special::{erfc, gamma_lr, digamma, ln_gamma, ln_std_normal_cdf, std_normal_cdf, trigamma, LN_SQRT_2PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyTag {
    Normal,
    Lognormal,
    Gamma,
    Logistic,
    InverseGaussian,
    Maxwell,
    Levy,
}

/// How a parameter behaves under the default prior box.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamKind {
    /// Unbounded real parameter.
    Location,
    /// Strictly positive parameter.
    Positive,
}

impl FamilyTag {
    pub const ALL: [FamilyTag; 7] = [
        FamilyTag::Normal,
        FamilyTag::Lognormal,
        FamilyTag::Gamma,
        FamilyTag::Logistic,
        FamilyTag::InverseGaussian,
        FamilyTag::Maxwell,
        FamilyTag::Levy,
    ];

    /// Number of free parameters `k`.
    pub fn n_params(self) -> usize {
        2
    }

    pub fn name(self) -> &'static str {
        match self {
            FamilyTag::Normal => "normal",
            FamilyTag::Lognormal => "lognormal",
            FamilyTag::Gamma => "gamma",
            FamilyTag::Logistic => "logistic",
            FamilyTag::InverseGaussian => "inverse-gaussian",
            FamilyTag::Maxwell => "maxwell",
            FamilyTag::Levy => "levy",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            FamilyTag::Normal => &["mean", "std"],
            FamilyTag::Lognormal => &["mu", "sigma"],
            FamilyTag::Gamma => &["shape", "scale"],
            FamilyTag::Logistic => &["loc", "scale"],
            FamilyTag::InverseGaussian => &["mean", "shape"],
            FamilyTag::Maxwell => &["loc", "scale"],
            FamilyTag::Levy => &["loc", "scale"],
        }
    }

    pub fn param_kinds(self) -> &'static [ParamKind] {
        use ParamKind::*;
        match self {
            FamilyTag::Gamma | FamilyTag::InverseGaussian => &[Positive, Positive],
            _ => &[Location, Positive],
        }
    }

    /// Whether the support is the whole real line.
    pub fn unbounded_support(self) -> bool {
        matches!(self, FamilyTag::Normal | FamilyTag::Logistic)
    }
}

impl fmt::Display for FamilyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FamilyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace(['_', ' '], "-");
        FamilyTag::ALL
            .into_iter()
            .find(|f| f.name() == key || (key == "inversegaussian" && *f == FamilyTag::InverseGaussian))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown distribution family '{s}'")))
    }
}

/// A fully specified distribution: family plus parameter vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    pub family: FamilyTag,
    pub theta: Vec<f64>,
}

impl DistributionSpec {
    pub fn new(family: FamilyTag, theta: Vec<f64>) -> Result<Self> {
        let spec = DistributionSpec { family, theta };
        spec.validate()?;
        Ok(spec)
    }

    pub fn normal(mean: f64, std: f64) -> Result<Self> {
        Self::new(FamilyTag::Normal, vec![mean, std])
    }

    pub fn lognormal(mu: f64, sigma: f64) -> Result<Self> {
        Self::new(FamilyTag::Lognormal, vec![mu, sigma])
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |reason| Error::InvalidParameters {
            family: self.family,
            theta: self.theta.clone(),
            reason,
        };
        if self.theta.len() != self.family.n_params() {
            return Err(invalid("wrong number of parameters"));
        }
        if self.theta.iter().any(|v| !v.is_finite()) {
            return Err(invalid("non-finite parameter"));
        }
        for (value, kind) in self.theta.iter().zip(self.family.param_kinds()) {
            if *kind == ParamKind::Positive && *value <= 0.0 {
                return Err(invalid("scale and shape parameters must be positive"));
            }
        }
        Ok(())
    }

    /// Natural log of the density; `-inf` outside the support.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal => {
                let z = (x - a) / b;
                -0.5 * z * z - b.ln() - LN_SQRT_2PI
            }
            FamilyTag::Lognormal => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                let lx = x.ln();
                let z = (lx - a) / b;
                -0.5 * z * z - b.ln() - LN_SQRT_2PI - lx
            }
            FamilyTag::Gamma => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                (a - 1.0) * x.ln() - x / b - ln_gamma(a) - a * b.ln()
            }
            FamilyTag::Logistic => {
                let z = ((x - a) / b).abs();
                -z - b.ln() - 2.0 * (-z).exp().ln_1p()
            }
            FamilyTag::InverseGaussian => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                0.5 * (b / (2.0 * PI * x * x * x)).ln() - b * (x - a) * (x - a) / (2.0 * a * a * x)
            }
            FamilyTag::Maxwell => {
                let y = x - a;
                if y <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                0.5 * (2.0 / PI).ln() + 2.0 * y.ln() - 3.0 * b.ln() - y * y / (2.0 * b * b)
            }
            FamilyTag::Levy => {
                let y = x - a;
                if y <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                0.5 * (b / (2.0 * PI)).ln() - b / (2.0 * y) - 1.5 * y.ln()
            }
        }
    }

    /// Density evaluated directly (not through `ln_pdf`).
    pub fn pdf(&self, x: f64) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal => {
                let z = (x - a) / b;
                (-0.5 * z * z).exp() / (b * (2.0 * PI).sqrt())
            }
            FamilyTag::Lognormal => {
                if x <= 0.0 {
                    return 0.0;
                }
                let z = (x.ln() - a) / b;
                (-0.5 * z * z).exp() / (x * b * (2.0 * PI).sqrt())
            }
            FamilyTag::Gamma => {
                if x <= 0.0 {
                    return 0.0;
                }
                // the normalizer overflows for large shapes, so fold it in via exp
                (x / b).powf(a - 1.0) * (-x / b - ln_gamma(a)).exp() / b
            }
            FamilyTag::Logistic => {
                let e = (-((x - a) / b).abs()).exp();
                e / (b * (1.0 + e) * (1.0 + e))
            }
            FamilyTag::InverseGaussian => {
                if x <= 0.0 {
                    return 0.0;
                }
                (b / (2.0 * PI * x * x * x)).sqrt() * (-b * (x - a) * (x - a) / (2.0 * a * a * x)).exp()
            }
            FamilyTag::Maxwell => {
                let y = x - a;
                if y <= 0.0 {
                    return 0.0;
                }
                (2.0 / PI).sqrt() * y * y / (b * b * b) * (-y * y / (2.0 * b * b)).exp()
            }
            FamilyTag::Levy => {
                let y = x - a;
                if y <= 0.0 {
                    return 0.0;
                }
                (b / (2.0 * PI)).sqrt() * (-b / (2.0 * y)).exp() / (y * y.sqrt())
            }
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal => std_normal_cdf((x - a) / b),
            FamilyTag::Lognormal => {
                if x <= 0.0 {
                    0.0
                } else {
                    std_normal_cdf((x.ln() - a) / b)
                }
            }
            FamilyTag::Gamma => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma_lr(a, x / b)
                }
            }
            FamilyTag::Logistic => 1.0 / (1.0 + (-(x - a) / b).exp()),
            FamilyTag::InverseGaussian => {
                if x <= 0.0 {
                    return 0.0;
                }
                let r = (b / x).sqrt();
                let first = std_normal_cdf(r * (x / a - 1.0));
                let second = (2.0 * b / a + ln_std_normal_cdf(-r * (x / a + 1.0))).exp();
                (first + second).min(1.0)
            }
            FamilyTag::Maxwell => {
                let y = x - a;
                if y <= 0.0 {
                    0.0
                } else {
                    gamma_lr(1.5, y * y / (2.0 * b * b))
                }
            }
            FamilyTag::Levy => {
                let y = x - a;
                if y <= 0.0 {
                    0.0
                } else {
                    erfc((b / (2.0 * y)).sqrt())
                }
            }
        }
    }

    /// Lower end of the support (`-inf` for whole-line families).
    pub fn support_lower(&self) -> f64 {
        match self.family {
            FamilyTag::Normal | FamilyTag::Logistic => f64::NEG_INFINITY,
            FamilyTag::Lognormal | FamilyTag::Gamma | FamilyTag::InverseGaussian => 0.0,
            FamilyTag::Maxwell | FamilyTag::Levy => self.theta[0],
        }
    }

    pub fn mean(&self) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal | FamilyTag::Logistic | FamilyTag::InverseGaussian => a,
            FamilyTag::Lognormal => (a + 0.5 * b * b).exp(),
            FamilyTag::Gamma => a * b,
            FamilyTag::Maxwell => a + 2.0 * b * (2.0 / PI).sqrt(),
            FamilyTag::Levy => f64::INFINITY,
        }
    }

    pub fn std_dev(&self) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal => b,
            FamilyTag::Lognormal => ((b * b).exp_m1()).sqrt() * (a + 0.5 * b * b).exp(),
            FamilyTag::Gamma => a.sqrt() * b,
            FamilyTag::Logistic => b * PI / 3f64.sqrt(),
            FamilyTag::InverseGaussian => (a * a * a / b).sqrt(),
            FamilyTag::Maxwell => b * ((3.0 * PI - 8.0) / PI).sqrt(),
            FamilyTag::Levy => f64::INFINITY,
        }
    }

    /// One draw. Assumes validated parameters.
    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let (a, b) = (self.theta[0], self.theta[1]);
        match self.family {
            FamilyTag::Normal => Normal::new(a, b).expect("validated").sample(rng),
            FamilyTag::Lognormal => LogNormal::new(a, b).expect("validated").sample(rng),
            FamilyTag::Gamma => Gamma::new(a, b).expect("validated").sample(rng),
            FamilyTag::Logistic => {
                let u: f64 = Open01.sample(rng);
                a + b * (u / (1.0 - u)).ln()
            }
            FamilyTag::InverseGaussian => InverseGaussian::new(a, b).expect("validated").sample(rng),
            FamilyTag::Maxwell => {
                let r2: f64 = (0..3)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        z * z
                    })
                    .sum();
                a + b * r2.sqrt()
            }
            FamilyTag::Levy => {
                let z: f64 = StandardNormal.sample(rng);
                a + b / (z * z)
            }
        }
    }

    /// `n` i.i.d. draws.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<f64>> {
        self.validate()?;
        Ok((0..n).map(|_| self.sample_one(rng)).collect())
    }

    /// Σ ln p(xᵢ).
    pub fn log_likelihood(&self, data: &[f64]) -> f64 {
        data.iter().map(|&x| self.ln_pdf(x)).sum()
    }
}

/// Underlying-Gaussian parameters `(μ, σ)` of a lognormal with the given mean and std.
pub fn moments_to_lognormal(mean: f64, std: f64) -> Result<(f64, f64)> {
    if !(mean > 0.0) || !(std > 0.0) || !mean.is_finite() || !std.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "lognormal moments must be positive, got mean {mean}, std {std}"
        )));
    }
    let cv = std / mean;
    let sigma = (cv * cv).ln_1p().sqrt();
    let mu = mean.ln() - 0.5 * sigma * sigma;
    Ok((mu, sigma))
}

/// Sample measurements of one physical variable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub values: Vec<f64>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("dataset"));
        }
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!("non-finite measurement {bad}")));
        }
        Ok(Dataset {
            name: name.into(),
            values,
        })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Maximum-likelihood estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct MleFit {
    pub spec: DistributionSpec,
    pub loglik: f64,
}

struct Summary {
    n: f64,
    mean: f64,
    std: f64,
    min: f64,
    median: f64,
    iqr: f64,
}

fn summarize(data: &[f64]) -> Summary {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let mut sorted = data.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (sorted.len() - 1) as f64;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
    };
    Summary {
        n,
        mean,
        std: var.sqrt(),
        min: sorted[0],
        median: q(0.5),
        iqr: q(0.75) - q(0.25),
    }
}

/// Fit `family` to `data` by maximum likelihood.
///
/// Normal, lognormal and inverse Gaussian have closed forms; gamma solves its
/// one-dimensional shape equation by Newton iteration; logistic, Maxwell and
/// Lévy use multi-start Nelder–Mead (the latter two on the profile likelihood
/// of the location, with the scale in closed form).
pub fn fit_mle(family: FamilyTag, data: &[f64]) -> Result<MleFit> {
    let infeasible = |reason: &str| Error::FitInfeasible {
        family,
        reason: reason.to_string(),
    };
    if data.len() < 2 {
        return Err(infeasible("at least two observations are required"));
    }
    if data.iter().any(|v| !v.is_finite()) {
        return Err(infeasible("non-finite observation"));
    }
    let s = summarize(data);
    if !(s.std > 0.0) {
        return Err(infeasible("data have zero spread"));
    }
    let positive = data.iter().all(|&x| x > 0.0);

    let theta = match family {
        FamilyTag::Normal => vec![s.mean, s.std],
        FamilyTag::Lognormal => {
            if !positive {
                return Err(infeasible("lognormal requires positive data"));
            }
            let logs: Vec<f64> = data.iter().map(|x| x.ln()).collect();
            let m = logs.iter().sum::<f64>() / s.n;
            let v = logs.iter().map(|l| (l - m) * (l - m)).sum::<f64>() / s.n;
            vec![m, v.sqrt()]
        }
        FamilyTag::Gamma => {
            if !positive {
                return Err(infeasible("gamma requires positive data"));
            }
            let mean_log = data.iter().map(|x| x.ln()).sum::<f64>() / s.n;
            let stat = s.mean.ln() - mean_log;
            if !(stat > 0.0) {
                return Err(infeasible("degenerate gamma shape statistic"));
            }
            let shape = gamma_shape(stat);
            vec![shape, s.mean / shape]
        }
        FamilyTag::InverseGaussian => {
            if !positive {
                return Err(infeasible("inverse Gaussian requires positive data"));
            }
            let inv = data.iter().map(|x| 1.0 / x).sum::<f64>() / s.n - 1.0 / s.mean;
            if !(inv > 0.0) {
                return Err(infeasible("degenerate inverse Gaussian shape"));
            }
            vec![s.mean, 1.0 / inv]
        }
        FamilyTag::Logistic => fit_logistic(data, &s),
        FamilyTag::Maxwell => fit_profile(data, &s, maxwell_scale, FamilyTag::Maxwell),
        FamilyTag::Levy => fit_profile(data, &s, levy_scale, FamilyTag::Levy),
    };

    let spec = DistributionSpec::new(family, theta).map_err(|e| infeasible(&e.to_string()))?;
    let loglik = spec.log_likelihood(data);
    if !loglik.is_finite() {
        return Err(infeasible("non-finite log-likelihood at the optimum"));
    }
    Ok(MleFit { spec, loglik })
}

/// Solve `ln k − ψ(k) = stat` for the gamma shape `k`.
fn gamma_shape(stat: f64) -> f64 {
    // Minka's starting point
    let mut k = (3.0 - stat + ((stat - 3.0).powi(2) + 24.0 * stat).sqrt()) / (12.0 * stat);
    for _ in 0..100 {
        let f = k.ln() - digamma(k) - stat;
        let df = 1.0 / k - trigamma(k);
        let next = k - f / df;
        let next = if next > 0.0 { next } else { 0.5 * k };
        if (next - k).abs() <= 1e-14 * k {
            k = next;
            break;
        }
        k = next;
    }
    k
}

fn fit_logistic(data: &[f64], s: &Summary) -> Vec<f64> {
    let objective = |p: &[f64]| {
        let spec = DistributionSpec {
            family: FamilyTag::Logistic,
            theta: vec![p[0], p[1].exp()],
        };
        -spec.log_likelihood(data)
    };
    let starts = [
        [s.mean, (s.std * 3f64.sqrt() / PI).ln()],
        [s.median, (s.iqr.max(1e-12 * s.std) / (2.0 * 3f64.ln())).ln()],
    ];
    let nm = NelderMead::default();
    let best = starts
        .iter()
        .map(|x0| nm.minimize_with_restarts(objective, x0, &[0.1 * s.std, 0.1], 8))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("non-empty starts");
    vec![best.x[0], best.x[1].exp()]
}

/// Closed-form Maxwell scale for a given location.
fn maxwell_scale(data: &[f64], loc: f64) -> f64 {
    let ss: f64 = data.iter().map(|x| (x - loc) * (x - loc)).sum();
    (ss / (3.0 * data.len() as f64)).sqrt()
}

/// Closed-form Lévy scale for a given location.
fn levy_scale(data: &[f64], loc: f64) -> f64 {
    let inv: f64 = data.iter().map(|x| 1.0 / (x - loc)).sum();
    data.len() as f64 / inv
}

/// Location-scale families with support `x > loc`: maximize the profile
/// likelihood over `loc = min(x) − span·e^t`, seeded from a grid of starts.
fn fit_profile(data: &[f64], s: &Summary, scale_at: fn(&[f64], f64) -> f64, family: FamilyTag) -> Vec<f64> {
    let span = s.std;
    let loc_of = |t: f64| s.min - span * t.exp();
    let objective = |p: &[f64]| {
        let loc = loc_of(p[0]);
        let scale = scale_at(data, loc);
        if !(scale > 0.0) || !scale.is_finite() {
            return f64::INFINITY;
        }
        let spec = DistributionSpec {
            family,
            theta: vec![loc, scale],
        };
        -spec.log_likelihood(data)
    };
    let mut starts: Vec<f64> = (-12..=6).map(|i| i as f64 * 0.75).collect();
    if family == FamilyTag::Maxwell {
        // method of moments
        let a = s.std / ((3.0 * PI - 8.0) / PI).sqrt();
        let loc = s.mean - 2.0 * a * (2.0 / PI).sqrt();
        if loc < s.min {
            starts.push(((s.min - loc) / span).ln());
        }
    }
    // coarse scan, then polish the best few starts
    let mut scored: Vec<(f64, f64)> = starts.iter().map(|&t| (objective(&[t]), t)).collect();
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    let nm = NelderMead::default();
    let best = scored
        .iter()
        .take(3)
        .map(|&(_, t)| nm.minimize_with_restarts(objective, &[t], &[0.5], 8))
        .min_by(|a, b| a.value.total_cmp(&b.value))
        .expect("non-empty starts");
    let loc = loc_of(best.x[0]);
    vec![loc, scale_at(data, loc)]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn spec(f: FamilyTag, a: f64, b: f64) -> DistributionSpec {
        DistributionSpec::new(f, vec![a, b]).unwrap()
    }

    #[test]
    fn ln_pdf_reference_values() {
        assert_relative_eq!(spec(FamilyTag::Normal, 0.0, 1.0).ln_pdf(0.0), -0.918_938_533_204_672_7, epsilon = 1e-7);
        let ln = spec(FamilyTag::Lognormal, 6.8880, 0.19804);
        assert_eq!(ln.ln_pdf(0.0), f64::NEG_INFINITY);
        assert_eq!(ln.ln_pdf(-3.0), f64::NEG_INFINITY);
        assert_relative_eq!(spec(FamilyTag::Logistic, 0.2, 1.0).ln_pdf(0.2), (0.25f64).ln(), epsilon = 1e-7);
    }

    #[test]
    fn invalid_scale_is_a_parameter_error() {
        for family in FamilyTag::ALL {
            let err = DistributionSpec::new(family, vec![1.0, -1.0]).unwrap_err();
            assert!(matches!(err, Error::InvalidParameters { .. }));
            assert!(DistributionSpec::new(family, vec![1.0, 0.0]).is_err());
        }
        assert!(DistributionSpec::new(FamilyTag::Gamma, vec![0.0, 1.0]).is_err());
        assert!(DistributionSpec::new(FamilyTag::Normal, vec![0.0]).is_err());
    }

    #[test]
    fn sample_zero_is_empty() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for family in FamilyTag::ALL {
            assert!(spec(family, 1.0, 1.0).sample(0, &mut rng).unwrap().is_empty());
        }
    }

    #[test]
    fn sampling_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 100_000;
        let xs = spec(FamilyTag::Normal, 0.0, 1.0).sample(n, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!(mean.abs() < 4.0 / (n as f64).sqrt());

        let a = 1.7;
        let xs = spec(FamilyTag::Maxwell, 0.0, a).sample(n, &mut rng).unwrap();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert_relative_eq!(mean, 2.0 * a * (2.0 / PI).sqrt(), max_relative = 0.01);
    }

    #[test]
    fn sampling_is_deterministic() {
        for family in FamilyTag::ALL {
            let s = spec(family, 2.0, 1.5);
            let a = s.sample(50, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
            let b = s.sample(50, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn normal_mle_uses_population_variance() {
        let fit = fit_mle(FamilyTag::Normal, &[-1.0, 0.0, 1.0]).unwrap();
        assert_relative_eq!(fit.spec.theta[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(fit.spec.theta[1], (2.0f64 / 3.0).sqrt(), max_relative = 1e-14);
        let direct: f64 = [-1.0, 0.0, 1.0].iter().map(|&x| fit.spec.ln_pdf(x)).sum();
        assert_relative_eq!(fit.loglik, direct, max_relative = 1e-14);
    }

    #[test]
    fn positive_families_reject_non_positive_data() {
        for family in [FamilyTag::Lognormal, FamilyTag::Gamma, FamilyTag::InverseGaussian] {
            let err = fit_mle(family, &[1.0, 2.0, 0.0, 3.0]).unwrap_err();
            assert!(matches!(err, Error::FitInfeasible { .. }), "{family}");
            assert!(fit_mle(family, &[1.0, -2.0, 3.0]).is_err());
        }
    }

    #[test]
    fn constant_data_is_infeasible() {
        for family in FamilyTag::ALL {
            assert!(fit_mle(family, &[2.0, 2.0, 2.0, 2.0]).is_err());
        }
    }

    #[test]
    fn lognormal_moment_conversion() {
        let (mu, sigma) = moments_to_lognormal(1000.0, 200.0).unwrap();
        assert!((sigma - 0.198).abs() < 5e-4);
        assert!((mu.exp() - 980.58).abs() < 5e-3);
        let (mu, sigma) = moments_to_lognormal(0.03, 0.0045).unwrap();
        assert!((sigma - 0.149).abs() < 5e-4);
        assert!((mu.exp() - 0.029).abs() < 1e-3);
        let (mu, sigma) = moments_to_lognormal(5.0, 1e-9).unwrap();
        assert!(sigma < 1e-9);
        assert_relative_eq!(mu.exp(), 5.0, max_relative = 1e-12);
        assert!(moments_to_lognormal(0.0, 1.0).is_err());
        assert!(moments_to_lognormal(1.0, -1.0).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for family in FamilyTag::ALL {
            assert_eq!(family.name().parse::<FamilyTag>().unwrap(), family);
        }
        assert_eq!("Inverse_Gaussian".parse::<FamilyTag>().unwrap(), FamilyTag::InverseGaussian);
        assert!("weibull".parse::<FamilyTag>().is_err());
    }

    #[test]
    fn inverse_gaussian_cdf_survives_large_shape() {
        // 2λ/μ ≈ 350: the second CDF term needs log-space evaluation
        let s = spec(FamilyTag::InverseGaussian, 28623.0, 5.0e6);
        for x in [20000.0, 28623.0, 40000.0] {
            let c = s.cdf(x);
            assert!(c.is_finite() && (0.0..=1.0).contains(&c), "{x} -> {c}");
        }
        assert!(s.cdf(40000.0) > 0.999);
    }
}

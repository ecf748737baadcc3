//! Parameter priors and the unnormalized log posterior.

use serde::{Deserialize, Serialize};

use crate::distributions::{DistributionSpec, FamilyTag, MleFit, ParamKind};
use crate::error::{Error, Result};
use crate::special::{ln_gamma, LN_SQRT_2PI};

/// Uniform prior on an axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriorBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// The prior family used for posterior sampling.
pub type PriorSpec = PriorBox;

impl PriorBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "prior box needs finite lower < upper, got {lower:?} .. {upper:?}"
            )));
        }
        Ok(PriorBox { lower, upper })
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn contains(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim()
            && theta
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(t, (l, u))| *l <= *t && *t <= *u)
    }

    /// Log density of the uniform prior; `-inf` outside the box.
    pub fn ln_density(&self, theta: &[f64]) -> f64 {
        if !self.contains(theta) {
            return f64::NEG_INFINITY;
        }
        -self
            .lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l).ln())
            .sum::<f64>()
    }

    pub fn clip(&self, theta: &mut [f64]) {
        for (t, (l, u)) in theta.iter_mut().zip(self.lower.iter().zip(&self.upper)) {
            *t = t.clamp(*l, *u);
        }
    }

    /// Default box around an MLE: `[θ/w, wθ]` for positive parameters and
    /// `θ ± w·(asymptotic std)` for location parameters, with `w = width`.
    pub fn around_mle(fit: &MleFit, data: &[f64], width: f64) -> Result<Self> {
        let theta = &fit.spec.theta;
        let family = fit.spec.family;
        let stds = asymptotic_std(&fit.spec, data);
        let mut lower = Vec::with_capacity(theta.len());
        let mut upper = Vec::with_capacity(theta.len());
        for (i, kind) in family.param_kinds().iter().enumerate() {
            match kind {
                ParamKind::Positive => {
                    lower.push(theta[i] / width);
                    upper.push(theta[i] * width);
                }
                ParamKind::Location => {
                    lower.push(theta[i] - width * stds[i]);
                    upper.push(theta[i] + width * stds[i]);
                }
            }
        }
        PriorBox::new(lower, upper)
    }
}

/// Square roots of the diagonal of the inverse observed information, by
/// central differences. Falls back to a family spread / √n for any parameter
/// whose curvature is not usable.
pub fn asymptotic_std(spec: &DistributionSpec, data: &[f64]) -> Vec<f64> {
    let n = data.len() as f64;
    let spread = {
        let s = spec.std_dev();
        if s.is_finite() && s > 0.0 {
            s
        } else {
            spec.theta[1]
        }
    };
    let fallback: Vec<f64> = spec
        .theta
        .iter()
        .enumerate()
        .map(|(i, t)| match spec.family.param_kinds()[i] {
            ParamKind::Location => spread / n.sqrt(),
            ParamKind::Positive => t.abs() / n.sqrt(),
        })
        .collect();

    let k = spec.theta.len();
    let steps: Vec<f64> = spec
        .theta
        .iter()
        .enumerate()
        .map(|(i, t)| match spec.family.param_kinds()[i] {
            ParamKind::Location => 1e-4 * spread,
            ParamKind::Positive => 1e-4 * t.abs(),
        })
        .collect();
    let ll = |theta: &[f64]| -> f64 {
        let s = DistributionSpec {
            family: spec.family,
            theta: theta.to_vec(),
        };
        if s.validate().is_err() {
            return f64::NAN;
        }
        s.log_likelihood(data)
    };
    let mut hess = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..k {
            let mut value = 0.0;
            for (si, sj, sign) in [(1.0, 1.0, 1.0), (1.0, -1.0, -1.0), (-1.0, 1.0, -1.0), (-1.0, -1.0, 1.0)] {
                let mut th = spec.theta.clone();
                th[i] += si * steps[i];
                th[j] += sj * steps[j];
                value += sign * ll(&th);
            }
            hess[i][j] = value / (4.0 * steps[i] * steps[j]);
        }
    }
    // invert the negated 2×2 Hessian
    if k == 2 {
        let (a, b, c, d) = (-hess[0][0], -hess[0][1], -hess[1][0], -hess[1][1]);
        let det = a * d - b * c;
        if det.is_finite() && det > 0.0 && a > 0.0 && d > 0.0 {
            let var = [d / det, a / det];
            return var
                .iter()
                .zip(&fallback)
                .map(|(v, f)| if v.is_finite() && *v > 0.0 { v.sqrt() } else { *f })
                .collect();
        }
    }
    fallback
}

/// Log-likelihood of a family on fixed data, using sufficient statistics
/// where the family admits them.
#[derive(Debug, Clone)]
pub struct LogLikelihood<'a> {
    family: FamilyTag,
    data: &'a [f64],
    stats: Stats,
}

#[derive(Debug, Clone)]
enum Stats {
    /// Centered moments of `x`: mean and Σ(x − mean)².
    Normal { mean: f64, ss: f64 },
    /// Centered moments of `ln x` and Σ ln x.
    Lognormal { mean: f64, ss: f64, sum_log: f64 },
    Gamma { sum: f64, sum_log: f64 },
    InverseGaussian { sum: f64, sum_inv: f64, sum_log: f64 },
    /// No reduction; evaluate term by term.
    Direct,
}

impl<'a> LogLikelihood<'a> {
    pub fn new(family: FamilyTag, data: &'a [f64]) -> Self {
        let n = data.len() as f64;
        let positive = data.iter().all(|&x| x > 0.0);
        let centered = |values: &mut dyn Iterator<Item = f64>| {
            let v: Vec<f64> = values.collect();
            let mean = v.iter().sum::<f64>() / n;
            let ss = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
            (mean, ss)
        };
        let stats = match family {
            FamilyTag::Normal => {
                let (mean, ss) = centered(&mut data.iter().copied());
                Stats::Normal { mean, ss }
            }
            FamilyTag::Lognormal if positive => {
                let (mean, ss) = centered(&mut data.iter().map(|x| x.ln()));
                Stats::Lognormal {
                    mean,
                    ss,
                    sum_log: mean * n,
                }
            }
            FamilyTag::Gamma if positive => Stats::Gamma {
                sum: data.iter().sum(),
                sum_log: data.iter().map(|x| x.ln()).sum(),
            },
            FamilyTag::InverseGaussian if positive => Stats::InverseGaussian {
                sum: data.iter().sum(),
                sum_inv: data.iter().map(|x| 1.0 / x).sum(),
                sum_log: data.iter().map(|x| x.ln()).sum(),
            },
            _ => Stats::Direct,
        };
        LogLikelihood { family, data, stats }
    }

    pub fn family(&self) -> FamilyTag {
        self.family
    }

    pub fn data(&self) -> &'a [f64] {
        self.data
    }

    /// Σ ln p(xᵢ | θ); `-inf` for invalid parameters.
    pub fn eval(&self, theta: &[f64]) -> f64 {
        let spec = DistributionSpec {
            family: self.family,
            theta: theta.to_vec(),
        };
        if spec.validate().is_err() {
            return f64::NEG_INFINITY;
        }
        let n = self.data.len() as f64;
        let (a, b) = (theta[0], theta[1]);
        match self.stats {
            Stats::Normal { mean, ss } => {
                let sq = ss + n * (mean - a) * (mean - a);
                -n * (b.ln() + LN_SQRT_2PI) - sq / (2.0 * b * b)
            }
            Stats::Lognormal { mean, ss, sum_log } => {
                let sq = ss + n * (mean - a) * (mean - a);
                -n * (b.ln() + LN_SQRT_2PI) - sq / (2.0 * b * b) - sum_log
            }
            Stats::Gamma { sum, sum_log } => {
                (a - 1.0) * sum_log - sum / b - n * (ln_gamma(a) + a * b.ln())
            }
            Stats::InverseGaussian { sum, sum_inv, sum_log } => {
                let quad = sum - 2.0 * n * a + a * a * sum_inv;
                0.5 * n * (b / (2.0 * std::f64::consts::PI)).ln() - 1.5 * sum_log - b * quad / (2.0 * a * a)
            }
            Stats::Direct => spec.log_likelihood(self.data),
        }
    }
}

/// Unnormalized log posterior: log-likelihood plus log prior, `-inf` outside the prior box.
pub fn log_posterior(theta: &[f64], data: &[f64], family: FamilyTag, prior: &PriorSpec) -> f64 {
    let lp = prior.ln_density(theta);
    if lp == f64::NEG_INFINITY {
        return lp;
    }
    let spec = DistributionSpec {
        family,
        theta: theta.to_vec(),
    };
    if spec.validate().is_err() {
        return f64::NEG_INFINITY;
    }
    spec.log_likelihood(data) + lp
}

//! Empirical distribution functions, quantiles and Kolmogorov–Smirnov
//! statistics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Asymptotic KS critical coefficient `c(α)` for α = 0.01.
pub const KS_C_01: f64 = 1.628;
/// Asymptotic KS critical coefficient `c(α)` for α = 0.05.
pub const KS_C_05: f64 = 1.358;

/// Right-continuous empirical CDF over a sorted copy of the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput("ecdf values"));
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::InvalidArgument("ecdf values contain NaN".into()));
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        Ok(Ecdf { sorted })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    /// `F̂(t) = #{v ≤ t} / n`.
    pub fn eval(&self, t: f64) -> f64 {
        self.sorted.partition_point(|v| *v <= t) as f64 / self.sorted.len() as f64
    }

    /// Sample quantile with linear interpolation between order statistics
    /// (Hyndman–Fan type 7).
    pub fn quantile(&self, p: f64) -> f64 {
        quantile_sorted(&self.sorted, p)
    }

    pub fn median(&self) -> f64 {
        self.quantile(0.5)
    }

    /// Step points `(v_(i), i/n)` for plotting.
    pub fn steps(&self) -> Vec<(f64, f64)> {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, (i + 1) as f64 / n))
            .collect()
    }
}

/// Type-7 quantile of an ascending slice.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// `sup_t |F̂(t) − F(t)|` for a sample against an analytic CDF.
pub fn ks_one_sample<F: Fn(f64) -> f64>(sample: &[f64], cdf: F) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in sorted.iter().enumerate() {
        let f = cdf(*x);
        d = d.max((i + 1) as f64 / n - f).max(f - i as f64 / n);
    }
    d
}

/// Two-sample statistic `sup_t |F̂_a(t) − F̂_b(t)|`.
pub fn ks_two_sample(a: &Ecdf, b: &Ecdf) -> f64 {
    let (x, y) = (a.sorted(), b.sorted());
    let (n, m) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// One-sample critical value `c / √n`.
pub fn ks_critical(c: f64, n: usize) -> f64 {
    c / (n as f64).sqrt()
}

/// Two-sample critical value `c · √((n + m)/(n m))`.
pub fn ks_critical_two(c: f64, n: usize, m: usize) -> f64 {
    let (n, m) = (n as f64, m as f64);
    c * ((n + m) / (n * m)).sqrt()
}

pub fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Unbiased sample standard deviation.
pub fn std_dev(values: &[f64]) -> f64 {
    let m = mean(values);
    let n = values.len() as f64;
    (values.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

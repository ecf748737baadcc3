//! Special functions not covered by `statrs`, plus thin wrappers around it.

use std::f64::consts::PI;

pub use statrs::function::erf::erfc;
pub use statrs::function::gamma::{digamma, gamma_lr, ln_gamma};

pub const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Standard normal CDF.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// `ln(erfc(x))`, accurate far into the upper tail where `erfc` underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 25.0 {
        return erfc(x).ln();
    }
    let inv2 = 1.0 / (x * x);
    let series = 1.0 - 0.5 * inv2 + 0.75 * inv2 * inv2 - 1.875 * inv2 * inv2 * inv2;
    -x * x - (x * PI.sqrt()).ln() + series.ln()
}

/// `ln Φ(x)` for the standard normal CDF.
pub fn ln_std_normal_cdf(x: f64) -> f64 {
    (0.5f64).ln() + ln_erfc(-x / std::f64::consts::SQRT_2)
}

/// Trigamma function ψ'(x) for x > 0.
pub fn trigamma(mut x: f64) -> f64 {
    let mut acc = 0.0;
    while x < 12.0 {
        acc += 1.0 / (x * x);
        x += 1.0;
    }
    let inv = 1.0 / x;
    let inv2 = inv * inv;
    acc + inv
        + 0.5 * inv2
        + inv * inv2 * (1.0 / 6.0 - inv2 * (1.0 / 30.0 - inv2 * (1.0 / 42.0 - inv2 / 30.0)))
}

/// Numerically stable `ln Σ exp(values)`; `-inf` when every term is `-inf`.
pub fn log_sum_exp<I: IntoIterator<Item = f64> + Clone>(values: I) -> f64 {
    let max = values.clone().into_iter().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let sum: f64 = values.into_iter().map(|v| (v - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_erfc_matches_direct_evaluation_at_the_switch() {
        for x in [20.0, 24.0, 24.9] {
            assert_relative_eq!(ln_erfc(x), erfc(x).ln(), max_relative = 1e-12);
        }
        // continuity across the branch point
        assert_relative_eq!(ln_erfc(25.0 - 1e-9), ln_erfc(25.0), max_relative = 1e-9);
        assert!(ln_erfc(100.0).is_finite());
    }

    #[test]
    fn trigamma_known_values() {
        assert_relative_eq!(trigamma(1.0), PI * PI / 6.0, max_relative = 1e-12);
        assert_relative_eq!(trigamma(0.5), PI * PI / 2.0, max_relative = 1e-12);
        // finite-difference of digamma
        let h = 1e-5;
        let fd = (digamma(3.3 + h) - digamma(3.3 - h)) / (2.0 * h);
        assert_relative_eq!(trigamma(3.3), fd, max_relative = 1e-7);
    }

    #[test]
    fn log_sum_exp_extremes() {
        assert_eq!(log_sum_exp([f64::NEG_INFINITY, f64::NEG_INFINITY]), f64::NEG_INFINITY);
        assert_relative_eq!(log_sum_exp([-1000.0, -1000.0]), -1000.0 + 2f64.ln());
        assert_relative_eq!(std_normal_cdf(-3.0), 1.349_898_031_630_094_6e-3, max_relative = 1e-9);
    }
}

//! Linear limit state in standard normal space.

use std::f64::consts::SQRT_2;

use crate::special::std_normal_cdf;

/// `g(u) = β√2 − (u₁ + u₂)`.
pub fn g_linear(u: &[f64], beta: f64) -> f64 {
    beta * SQRT_2 - u.iter().sum::<f64>()
}

/// Exact failure probability `Φ(−β)` under iid standard normal inputs.
pub fn linear_exact_pf(beta: f64) -> f64 {
    std_normal_cdf(-beta)
}

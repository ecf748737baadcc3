//! Information criteria and the model probabilities derived from them.

use crate::error::{Error, Result};

/// Akaike information criterion, `−2 ln L + 2k`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    -2.0 * loglik + 2.0 * k as f64
}

/// Small-sample corrected AIC, `AIC + (2k² + k)/(n − k − 1)`.
pub fn aicc(loglik: f64, k: usize, n: usize) -> Result<f64> {
    if n <= k + 1 {
        return Err(Error::AiccDomain { n, k });
    }
    let kf = k as f64;
    Ok(aic(loglik, k) + (2.0 * kf * kf + kf) / (n - k - 1) as f64)
}

/// Differences to the best (smallest) criterion value.
pub fn criterion_deltas(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("criterion values"));
    }
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!("non-finite criterion value {bad}")));
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(values.iter().map(|v| v - min).collect())
}

/// Model probabilities `exp(−Δ/2) / Σ exp(−Δ/2)`.
pub fn model_probabilities(values: &[f64]) -> Result<Vec<f64>> {
    let deltas = criterion_deltas(values)?;
    // Δ ≥ 0 with at least one zero, so the sum is in [1, len] and never overflows
    let raw: Vec<f64> = deltas.iter().map(|d| (-0.5 * d).exp()).collect();
    let total: f64 = raw.iter().sum();
    Ok(raw.into_iter().map(|r| r / total).collect())
}

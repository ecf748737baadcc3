//! Buckling strength of a simply supported imperfect plate under uniaxial
//! compression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Offset between the inferred variable σ̂₀ and the yield strength σ₀.
pub const YIELD_SHIFT: f64 = 34.0;
/// Failure when the normalized strength drops below this value.
pub const PSI_LIMIT: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlateParams {
    /// Width (in).
    pub b: f64,
    /// Thickness (in).
    pub t: f64,
    /// Yield strength (ksi).
    pub sigma0: f64,
    /// Elastic modulus (ksi).
    pub e: f64,
    /// Initial deflection (in).
    pub delta0: f64,
    /// Residual stress parameter.
    pub eta: f64,
}

impl PlateParams {
    pub const NOMINAL: PlateParams = PlateParams {
        b: 24.0,
        t: 0.5,
        sigma0: 34.0,
        e: 29_000.0,
        delta0: 0.35,
        eta: 5.25,
    };

    /// Slenderness `λ = (b/t)√(σ₀/E)`.
    pub fn lambda(&self) -> f64 {
        self.b / self.t * (self.sigma0 / self.e).sqrt()
    }
}

/// Normalized buckling strength
/// `ψ = (2.1/λ − 0.9/λ²)(1 − 0.75δ₀/λ)(1 − 2ηt/b)`.
pub fn plate_psi(p: &PlateParams) -> Result<f64> {
    let lambda = p.lambda();
    if !(lambda > 0.0) || !lambda.is_finite() || !(p.b > 0.0) || !(p.t > 0.0) {
        return Err(Error::Model(format!("plate slenderness must be positive, got {lambda}")));
    }
    Ok((2.1 / lambda - 0.9 / (lambda * lambda)) * (1.0 - 0.75 * p.delta0 / lambda) * (1.0 - 2.0 * p.eta * p.t / p.b))
}

/// `ψ − 0.5` for `x = (σ̂₀, E)` with the other parameters at nominal.
///
/// A plate with non-positive yield strength or modulus carries no load, so
/// such inputs (reachable only under unbounded candidate families) count as
/// `ψ = 0`.
pub fn g_plate(x: &[f64]) -> Result<f64> {
    let p = PlateParams {
        sigma0: x[0] + YIELD_SHIFT,
        e: x[1],
        ..PlateParams::NOMINAL
    };
    if x.iter().any(|v| v.is_nan()) {
        return Err(Error::Model(format!("plate input contains NaN: {x:?}")));
    }
    if p.sigma0 <= 0.0 || p.e <= 0.0 {
        return Ok(-PSI_LIMIT);
    }
    Ok(plate_psi(&p)? - PSI_LIMIT)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nominal_values() {
        let p = PlateParams::NOMINAL;
        let lambda = 48.0 * (34.0f64 / 29000.0).sqrt();
        assert!((p.lambda() - lambda).abs() < 1e-14);
        assert!((p.lambda() - 1.6436).abs() < 1e-4);
        // hand evaluation, factor by factor
        let f1 = 2.1 / lambda - 0.9 / (lambda * lambda);
        let f2 = 1.0 - 0.75 * 0.35 / lambda;
        let f3 = 1.0 - 2.0 * 5.25 * 0.5 / 24.0;
        let psi = plate_psi(&p).unwrap();
        assert!((psi - f1 * f2 * f3).abs() < 1e-15);
        assert!((psi - 0.620).abs() < 5e-4);
    }

    #[test]
    fn perfect_plate() {
        let p = PlateParams {
            delta0: 0.0,
            eta: 0.0,
            ..PlateParams::NOMINAL
        };
        let l = p.lambda();
        assert!((plate_psi(&p).unwrap() - (2.1 / l - 0.9 / (l * l))).abs() < 1e-15);
    }

    #[test]
    fn decreasing_in_imperfections() {
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let p = PlateParams {
                delta0: 0.35 * (0.8 + 0.008 * i as f64),
                ..PlateParams::NOMINAL
            };
            let psi = plate_psi(&p).unwrap();
            assert!(psi < prev);
            prev = psi;
        }
        let mut prev = f64::INFINITY;
        for i in 0..=50 {
            let p = PlateParams {
                eta: 5.25 * (0.8 + 0.008 * i as f64),
                ..PlateParams::NOMINAL
            };
            let psi = plate_psi(&p).unwrap();
            assert!(psi < prev);
            prev = psi;
        }
    }

    #[test]
    fn invalid_slenderness() {
        let p = PlateParams {
            sigma0: -1.0,
            ..PlateParams::NOMINAL
        };
        assert!(plate_psi(&p).is_err());
        assert_eq!(g_plate(&[-40.0, 29000.0]).unwrap(), -PSI_LIMIT);
        assert_eq!(g_plate(&[10.0, -1.0]).unwrap(), -PSI_LIMIT);
        assert!(g_plate(&[f64::NAN, 29000.0]).is_err());
    }
}

#![allow(dead_code)]

use isus_core::{DistributionSpec, FamilyTag};

/// Parameter sets exercising each family in a typical and a skewed regime.
pub fn family_grid() -> Vec<DistributionSpec> {
    let raw: [(FamilyTag, [f64; 2]); 14] = [
        (FamilyTag::Normal, [0.0, 1.0]),
        (FamilyTag::Normal, [29_000.0, 2_204.0]),
        (FamilyTag::Lognormal, [0.0, 0.25]),
        (FamilyTag::Lognormal, [2.2, 1.2]),
        (FamilyTag::Gamma, [0.7, 2.0]),
        (FamilyTag::Gamma, [9.0, 1.1]),
        (FamilyTag::Logistic, [-3.0, 0.5]),
        (FamilyTag::Logistic, [10.0, 4.0]),
        (FamilyTag::InverseGaussian, [1.0, 0.4]),
        (FamilyTag::InverseGaussian, [10.2, 35.0]),
        (FamilyTag::Maxwell, [0.0, 1.0]),
        (FamilyTag::Maxwell, [-2.0, 3.5]),
        (FamilyTag::Levy, [0.0, 1.0]),
        (FamilyTag::Levy, [4.0, 0.3]),
    ];
    raw.iter()
        .map(|(f, t)| DistributionSpec::new(*f, t.to_vec()).unwrap())
        .collect()
}

/// Typical magnitude of a draw minus the lower support bound.
fn scale_of(spec: &DistributionSpec) -> f64 {
    let (a, b) = (spec.theta[0], spec.theta[1]);
    match spec.family {
        FamilyTag::Lognormal => a.exp(),
        FamilyTag::Gamma => a * b,
        FamilyTag::InverseGaussian => a,
        _ => b,
    }
}

fn chunked<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, pieces: usize) -> f64 {
    let h = (hi - lo) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let a = lo + i as f64 * h;
            quadrature::integrate(&f, a, a + h, 1e-12).integral
        })
        .sum()
}

/// `∫ f(x) p(x) dx` over the support of `spec`, by double-exponential
/// quadrature. Half-line supports are mapped through `x = L + e^t`.
pub fn integrate_against<F: Fn(f64) -> f64>(spec: &DistributionSpec, f: F) -> f64 {
    if spec.family.unbounded_support() {
        let (m, s) = (spec.theta[0], spec.theta[1]);
        chunked(|x| f(x) * spec.pdf(x), m - 80.0 * s, m + 80.0 * s, 64)
    } else {
        let lower = spec.support_lower();
        let c = scale_of(spec).ln();
        chunked(
            |t| {
                let y = t.exp();
                f(lower + y) * spec.pdf(lower + y) * y
            },
            c - 40.0,
            c + 45.0,
            85,
        )
    }
}

/// Probability mass of `spec` below `x` by quadrature of the density.
pub fn quadrature_cdf(spec: &DistributionSpec, x: f64) -> f64 {
    if spec.family.unbounded_support() {
        let (m, s) = (spec.theta[0], spec.theta[1]);
        if x <= m - 80.0 * s {
            return 0.0;
        }
        chunked(|y| spec.pdf(y), m - 80.0 * s, x, 64)
    } else {
        let lower = spec.support_lower();
        if x <= lower {
            return 0.0;
        }
        let c = scale_of(spec).ln();
        let top = (x - lower).ln();
        if top <= c - 40.0 {
            return 0.0;
        }
        chunked(
            |t| {
                let y = t.exp();
                spec.pdf(lower + y) * y
            },
            c - 40.0,
            top,
            64,
        )
    }
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        0.5 * (values[n / 2 - 1] + values[n / 2])
    }
}

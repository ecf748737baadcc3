//! Affine-invariant ensemble sampling with stretch moves.
//!
//! The ensemble is split into two halves that are updated in turn, each
//! walker drawing its partner from the other (frozen) half. For a walker
//! `X_j` and partner `X_k` the proposal is `Y = X_k + z (X_j − X_k)` with
//! `z ~ g(z) ∝ 1/√z` on `[1/a, a]`, accepted with probability
//! `min(1, z^(d−1) π(Y)/π(X_j))`.

use std::ops::Range;

use rand::Rng;

use crate::error::{Error, Result};

/// Draw a stretch factor from `g(z) ∝ 1/√z` on `[1/a, a]` by inversion.
pub fn draw_stretch_factor<R: Rng + ?Sized>(a: f64, rng: &mut R) -> f64 {
    let u: f64 = rng.random();
    let s = (a - 1.0) * u + 1.0;
    s * s / a
}

/// One proposed move for a walker of the active half.
#[derive(Debug, Clone)]
pub struct StretchProposal {
    pub walker: usize,
    pub partner: usize,
    pub z: f64,
    /// `ln` of the uniform variate used by the accept test.
    pub ln_u: f64,
    pub point: Vec<f64>,
}

impl StretchProposal {
    /// `(d − 1) ln z`, the Jacobian term of the stretch move.
    pub fn ln_jacobian(&self) -> f64 {
        (self.point.len() as f64 - 1.0) * self.z.ln()
    }

    /// The accept test given current and proposed log targets.
    pub fn accepts(&self, ln_current: f64, ln_proposed: f64) -> bool {
        if ln_proposed == f64::NEG_INFINITY || ln_proposed.is_nan() {
            return false;
        }
        self.ln_u < self.ln_jacobian() + ln_proposed - ln_current
    }
}

/// Proposals for every walker in `active`, partners drawn from `complement`.
///
/// The random draws per walker are fixed in number and order (partner, z, u),
/// so the stream position never depends on outcomes.
pub fn propose_half<R: Rng + ?Sized>(
    states: &[Vec<f64>],
    active: Range<usize>,
    complement: Range<usize>,
    a: f64,
    rng: &mut R,
) -> Vec<StretchProposal> {
    active
        .map(|walker| {
            let partner = rng.random_range(complement.clone());
            let z = draw_stretch_factor(a, rng);
            let u: f64 = rng.random();
            let x = &states[walker];
            let xk = &states[partner];
            let point = x.iter().zip(xk).map(|(xj, xk)| xk + z * (xj - xk)).collect();
            StretchProposal {
                walker,
                partner,
                z,
                ln_u: u.ln(),
                point,
            }
        })
        .collect()
}

/// The two half-ensembles of `n` walkers.
pub fn halves(n: usize) -> (Range<usize>, Range<usize>) {
    let h = n / 2;
    (0..h, h..n)
}

/// Post-burn-in output of an ensemble run.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainHistory {
    pub dim: usize,
    pub walkers: usize,
    /// Retained states in step-major order: every walker at the first kept
    /// step, then every walker at the next one, and so on.
    pub states: Vec<Vec<f64>>,
    pub log_probs: Vec<f64>,
    /// Fraction of accepted proposals over the whole run, burn-in included.
    pub acceptance_rate: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct StretchSettings {
    pub steps: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub a: f64,
}

/// Run the stretch sampler on `log_target` from the initial `walkers`.
pub fn stretch_sample<F, R>(log_target: F, walkers: Vec<Vec<f64>>, settings: StretchSettings, rng: &mut R) -> Result<ChainHistory>
where
    F: Fn(&[f64]) -> f64,
    R: Rng + ?Sized,
{
    let StretchSettings { steps, burn_in, thin, a } = settings;
    let n = walkers.len();
    let dim = walkers.first().map(Vec::len).ok_or(Error::EmptyInput("walkers"))?;
    if dim == 0 || walkers.iter().any(|w| w.len() != dim) {
        return Err(Error::InvalidArgument("walkers must share a positive dimension".into()));
    }
    if n < 2 * dim || n < 2 {
        return Err(Error::EnsembleTooSmall {
            required: (2 * dim).max(2),
            got: n,
        });
    }
    if !(a > 1.0) {
        return Err(Error::InvalidArgument(format!("stretch scale must exceed 1, got {a}")));
    }
    if thin == 0 {
        return Err(Error::InvalidArgument("thinning interval must be positive".into()));
    }
    if walkers.iter().all(|w| w == &walkers[0]) {
        return Err(Error::StuckEnsemble);
    }
    let mut states = walkers;
    let mut log_probs: Vec<f64> = states.iter().map(|s| log_target(s)).collect();
    if let Some(i) = log_probs.iter().position(|lp| !lp.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "walker {i} starts where the log target is {}",
            log_probs[i]
        )));
    }

    let (first, second) = halves(n);
    let mut accepted = 0usize;
    let mut kept_states = Vec::new();
    let mut kept_lp = Vec::new();
    for step in 0..steps {
        for (active, complement) in [(first.clone(), second.clone()), (second.clone(), first.clone())] {
            let proposals = propose_half(&states, active, complement, a, rng);
            for p in proposals {
                let lp = log_target(&p.point);
                if p.accepts(log_probs[p.walker], lp) {
                    states[p.walker] = p.point;
                    log_probs[p.walker] = lp;
                    accepted += 1;
                }
            }
        }
        if step >= burn_in && (step - burn_in + 1) % thin == 0 {
            kept_states.extend(states.iter().cloned());
            kept_lp.extend(log_probs.iter().copied());
        }
    }
    let proposals = (steps * n).max(1);
    Ok(ChainHistory {
        dim,
        walkers: n,
        states: kept_states,
        log_probs: kept_lp,
        acceptance_rate: accepted as f64 / proposals as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    fn gaussian(x: &[f64]) -> f64 {
        -0.5 * x.iter().map(|v| v * v).sum::<f64>()
    }

    fn init(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
        (0..n)
            .map(|_| (0..d).map(|_| StandardNormal.sample(rng)).collect())
            .collect()
    }

    #[test]
    fn stretch_factor_density() {
        // E[z] for g(z) ∝ 1/√z on [1/a, a] is (a² + a + 1)/(3a)
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = 2.0;
        let n = 200_000;
        let mean = (0..n).map(|_| draw_stretch_factor(a, &mut rng)).sum::<f64>() / n as f64;
        let expected = (a * a + a + 1.0) / (3.0 * a);
        assert!((mean - expected).abs() < 0.005, "{mean} vs {expected}");
        for _ in 0..1000 {
            let z = draw_stretch_factor(a, &mut rng);
            assert!((1.0 / a..=a).contains(&z));
        }
    }

    #[test]
    fn recovers_two_dimensional_gaussian() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let walkers = init(32, 2, &mut rng);
        let settings = StretchSettings {
            steps: 5000,
            burn_in: 500,
            thin: 1,
            a: 2.0,
        };
        let chain = stretch_sample(gaussian, walkers, settings, &mut rng).unwrap();
        for dim in 0..2 {
            let n = chain.states.len() as f64;
            let mean = chain.states.iter().map(|s| s[dim]).sum::<f64>() / n;
            let var = chain.states.iter().map(|s| (s[dim] - mean).powi(2)).sum::<f64>() / n;
            assert!((var - 1.0).abs() < 0.05, "dim {dim}: variance {var}");
        }
    }

    #[test]
    fn tiny_stretch_accepts_nearly_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let walkers = init(8, 2, &mut rng);
        let settings = StretchSettings {
            steps: 100,
            burn_in: 0,
            thin: 1,
            a: 1.0 + 1e-9,
        };
        let before = walkers.clone();
        let chain = stretch_sample(gaussian, walkers, settings, &mut rng).unwrap();
        assert!(chain.acceptance_rate > 0.99, "{}", chain.acceptance_rate);
        // proposals are (numerically) the current states
        let first = &chain.states[..8];
        for (a, b) in first.iter().zip(&before) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn one_dimensional_jacobian_is_one() {
        let p = StretchProposal {
            walker: 0,
            partner: 1,
            z: 1.7,
            ln_u: (0.5f64).ln(),
            point: vec![0.3],
        };
        assert_eq!(p.ln_jacobian(), 0.0);
        // accepted iff u < target ratio
        assert!(p.accepts(0.0, (0.6f64).ln()));
        assert!(!p.accepts(0.0, (0.4f64).ln()));
    }

    #[test]
    fn errors() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let settings = StretchSettings {
            steps: 10,
            burn_in: 0,
            thin: 1,
            a: 2.0,
        };
        let stuck = vec![vec![1.0, 2.0]; 8];
        assert_eq!(stretch_sample(gaussian, stuck, settings, &mut rng), Err(Error::StuckEnsemble));
        let small = init(3, 2, &mut rng);
        assert!(matches!(
            stretch_sample(gaussian, small, settings, &mut rng),
            Err(Error::EnsembleTooSmall { .. })
        ));
        let bad_a = StretchSettings { a: 1.0, ..settings };
        assert!(stretch_sample(gaussian, init(8, 2, &mut rng), bad_a, &mut rng).is_err());
    }
}

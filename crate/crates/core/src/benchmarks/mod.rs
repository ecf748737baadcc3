//! Benchmark performance functions, their reference input models, and a
//! plain Monte Carlo oracle.

pub mod frame;
pub mod ground_motion;
pub mod linear;
pub mod plate;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::SampleDensity;
use crate::distributions::{moments_to_lognormal, DistributionSpec};
use crate::error::{Error, Result};
use crate::inference::CandidateModel;
use crate::rng::MasterSeed;
use crate::sus::PerformanceFunction;

pub use frame::{frame_umax, g_frame, modes, FrameParams, Modes, UMAX_LIMIT};
pub use ground_motion::{srm_ground_motion, GroundMotion};
pub use linear::{g_linear, linear_exact_pf};
pub use plate::{g_plate, plate_psi, PlateParams};

/// Seed of the fixed ground-motion record used by the frame benchmark.
pub const FRAME_RECORD_SEED: u64 = 368;

/// The fixed frame excitation: default spectrum, `T = 1 s`, `dt = 0.02 s`,
/// 128 frequencies, phases from `FRAME_RECORD_SEED`.
pub fn frame_record() -> GroundMotion {
    frame_record_with(FRAME_RECORD_SEED, ground_motion::DEFAULT_N_FREQ)
}

/// A default-spectrum record for an arbitrary seed and frequency count.
pub fn frame_record_with(seed: u64, n_freq: usize) -> GroundMotion {
    let mut rng = MasterSeed(seed).stream("ground-motion", &[]);
    let mut gm = srm_ground_motion(
        ground_motion::DEFAULT_S0,
        ground_motion::DEFAULT_OMEGA_MAX,
        ground_motion::DEFAULT_DURATION,
        ground_motion::DEFAULT_DT,
        n_freq,
        &mut rng,
    )
    .expect("default discretization is valid");
    gm.seed = Some(seed);
    gm
}

/// A registered benchmark problem.
#[derive(Debug, Clone, PartialEq)]
pub enum Benchmark {
    Linear { beta: f64 },
    Plate,
    Frame { record: GroundMotion },
}

impl Benchmark {
    pub const NAMES: [&'static str; 3] = ["linear3", "plate", "frame"];

    /// Look up by name: `plate`, `frame`, or `linear<β>` (e.g. `linear3`).
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "plate" => Ok(Benchmark::Plate),
            "frame" => Ok(Benchmark::Frame { record: frame_record() }),
            _ => {
                let beta = name
                    .strip_prefix("linear")
                    .and_then(|b| b.parse::<f64>().ok())
                    .filter(|b| b.is_finite());
                match beta {
                    Some(beta) => Ok(Benchmark::Linear { beta }),
                    None => Err(Error::InvalidArgument(format!(
                        "unknown benchmark '{name}' (known: {})",
                        Self::NAMES.join(", ")
                    ))),
                }
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Benchmark::Linear { beta } => format!("linear{beta}"),
            Benchmark::Plate => "plate".into(),
            Benchmark::Frame { .. } => "frame".into(),
        }
    }

    pub fn variables(&self) -> Vec<String> {
        let names: &[&str] = match self {
            Benchmark::Linear { .. } => &["u1", "u2"],
            Benchmark::Plate => &["yield_shift", "elastic_modulus"],
            Benchmark::Frame { .. } => &["k1", "k2", "xi"],
        };
        names.iter().map(|s| s.to_string()).collect()
    }

    pub fn dim(&self) -> usize {
        self.variables().len()
    }

    /// The data-generating input model.
    pub fn truth(&self) -> CandidateModel {
        let specs = match self {
            Benchmark::Linear { .. } => vec![DistributionSpec::normal(0.0, 1.0).unwrap(); 2],
            Benchmark::Plate => {
                let (mu, sigma) = moments_to_lognormal(10.2, 5.4587).unwrap();
                vec![
                    DistributionSpec::lognormal(mu, sigma).unwrap(),
                    DistributionSpec::normal(29_000.0, 0.076 * 29_000.0).unwrap(),
                ]
            }
            Benchmark::Frame { .. } => {
                let (mk, sk) = moments_to_lognormal(1000.0, 200.0).unwrap();
                let (mx, sx) = moments_to_lognormal(0.03, 0.0045).unwrap();
                vec![
                    DistributionSpec::lognormal(mk, sk).unwrap(),
                    DistributionSpec::lognormal(mk, sk).unwrap(),
                    DistributionSpec::lognormal(mx, sx).unwrap(),
                ]
            }
        };
        CandidateModel { specs }
    }

    /// Published or exact failure probability under the truth.
    pub fn reference_pf(&self) -> f64 {
        match self {
            Benchmark::Linear { beta } => linear_exact_pf(*beta),
            Benchmark::Plate => 0.003,
            Benchmark::Frame { .. } => 2.4e-4,
        }
    }
}

impl fmt::Display for Benchmark {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PerformanceFunction for Benchmark {
    fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match self {
            Benchmark::Linear { beta } => Ok(g_linear(x, *beta)),
            Benchmark::Plate => g_plate(x),
            Benchmark::Frame { record } => g_frame(x, record),
        }
    }
}

/// Plain Monte Carlo estimate of `P(g ≤ 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub n: u64,
    pub failures: u64,
    pub pf: f64,
    /// `√((1 − pf)/(pf·n))`; `None` when no failure was observed.
    pub cov: Option<f64>,
}

impl McEstimate {
    pub fn from_counts(failures: u64, n: u64) -> Self {
        let pf = failures as f64 / n as f64;
        let cov = (failures > 0).then(|| ((1.0 - pf) / (pf * n as f64)).sqrt());
        McEstimate { n, failures, pf, cov }
    }

    /// Binomial standard error `√(pf(1 − pf)/n)`.
    pub fn std_error(&self) -> f64 {
        (self.pf * (1.0 - self.pf) / self.n as f64).sqrt()
    }
}

/// Points per Monte Carlo shard; each shard owns a derived stream.
pub const MC_SHARD: u64 = 10_000;

/// Estimate `P(g ≤ 0)` under `truth` with `n` iid samples.
///
/// Work is split into fixed-size shards, each with its own stream derived
/// from `(seed, "mc", shard)`, so the estimate is independent of the number
/// of worker threads.
pub fn mc_oracle<P, D>(g: &P, truth: &D, n: u64, seed: MasterSeed) -> Result<McEstimate>
where
    P: PerformanceFunction + ?Sized,
    D: SampleDensity,
{
    if n == 0 {
        return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
    }
    let shards = n.div_ceil(MC_SHARD);
    let failures = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.stream("mc", &[s]);
            let size = MC_SHARD.min(n - s * MC_SHARD);
            let mut hits = 0u64;
            for _ in 0..size {
                let x = truth.sample(&mut rng);
                let v = g.evaluate(&x)?;
                if v.is_nan() {
                    return Err(Error::NonFiniteResponse { value: v, point: x });
                }
                hits += (v <= 0.0) as u64;
            }
            Ok(hits)
        })
        .collect::<Result<Vec<u64>>>()?
        .into_iter()
        .sum();
    Ok(McEstimate::from_counts(failures, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sus::LimitStateFn;

    #[test]
    fn registry() {
        for name in Benchmark::NAMES {
            let b = Benchmark::by_name(name).unwrap();
            assert_eq!(b.name(), name);
            assert_eq!(b.truth().specs.len(), b.dim());
        }
        assert_eq!(Benchmark::by_name("linear2.5").unwrap(), Benchmark::Linear { beta: 2.5 });
        assert!(Benchmark::by_name("bridge").is_err());
    }

    #[test]
    fn always_failed_oracle() {
        let g = LimitStateFn(|_: &[f64]| -1.0);
        let truth = Benchmark::Plate.truth();
        let est = mc_oracle(&g, &truth, 1000, MasterSeed(1)).unwrap();
        assert_eq!(est.pf, 1.0);
        assert_eq!(est.cov, Some(0.0));
        let never = LimitStateFn(|_: &[f64]| 1.0);
        let est = mc_oracle(&never, &truth, 1000, MasterSeed(1)).unwrap();
        assert_eq!(est.pf, 0.0);
        assert_eq!(est.cov, None);
    }

    #[test]
    fn frame_record_is_fixed() {
        let a = frame_record();
        assert_eq!(a, frame_record());
        assert_eq!(a.len(), 50);
        let x = [1000.0, 1000.0, 0.03];
        let b = Benchmark::by_name("frame").unwrap();
        assert_eq!(b.evaluate(&x).unwrap().to_bits(), b.evaluate(&x).unwrap().to_bits());
    }

    #[test]
    fn rigid_frame_limit() {
        let b = Benchmark::by_name("frame").unwrap();
        let soft = b.evaluate(&[1000.0, 1000.0, 0.03]).unwrap();
        let stiff = b.evaluate(&[1e6, 1e6, 0.03]).unwrap();
        assert!(stiff > soft);
        assert!((stiff - UMAX_LIMIT).abs() < 1e-4);
    }
}

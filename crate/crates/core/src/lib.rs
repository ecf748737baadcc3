//! Imprecise subset simulation.
//!
//! Estimates how uncertainty about input distributions, inferred from small
//! datasets, propagates into a rare-event failure probability. Each input
//! variable gets a pool of fitted candidate families with AICc model
//! probabilities and Bayesian posterior parameter clouds. The pools define an
//! optimal sampling density; a single subset simulation under that density is
//! then re-weighted for every candidate model drawn from the pools, giving an
//! empirical distribution of failure probabilities.
//!
//! ```no_run
//! use isus_core::benchmarks::Benchmark;
//! use isus_core::pipeline::{fit_pools, run_isus, synthetic_datasets, IsusConfig};
//! use isus_core::rng::MasterSeed;
//!
//! let bench = Benchmark::by_name("plate")?;
//! let data = synthetic_datasets(&bench.truth(), &bench.variables(), 25, MasterSeed(1))?;
//! let cfg = IsusConfig::default();
//! let pools = fit_pools(&data, &cfg.inference, cfg.seed)?;
//! let result = run_isus(&bench, &pools, &cfg)?;
//! println!("median P_F = {:.3e}", result.distribution.summary.median);
//! # Ok::<(), isus_core::Error>(())
//! ```

pub mod benchmarks;
pub mod density;
pub mod distributions;
pub mod error;
pub mod inference;
pub mod optimize;
pub mod oracle;
pub mod pipeline;
pub mod reweight;
pub mod rng;
pub mod special;
pub mod stats;
pub mod sus;

pub use density::{JointDensity, LogDensity, MixtureComponent, MixtureDensity, SampleDensity, SamplingDensity};
pub use distributions::{fit_mle, Dataset, DistributionSpec, FamilyTag, MleFit};
pub use error::{Error, Result};
pub use inference::{CandidateModel, FittedModel, InferenceConfig, ModelPool, PosteriorCloud, PriorBox};
pub use reweight::{FailureDistribution, WeightMode};
pub use rng::MasterSeed;
pub use stats::Ecdf;
pub use sus::{Level, LimitStateFn, PerformanceFunction, SusConfig, SusRun};

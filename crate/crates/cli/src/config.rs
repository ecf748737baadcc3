//! Run configuration: an optional TOML file overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::Args;
use isus_core::benchmarks::Benchmark;
use isus_core::density::DEFAULT_N_MIX;
use isus_core::oracle::DEFAULT_CANDIDATE_CAP;
use isus_core::pipeline::IsusConfig;
use isus_core::{FamilyTag, InferenceConfig, MasterSeed, SusConfig, WeightMode};
use serde::{Deserialize, Serialize};

/// Where the candidate set for re-weighting comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum CandidateSource {
    /// `n_c` draws from the model pools.
    #[default]
    Pools,
    /// The optimal sampling density itself, as a single candidate.
    Mixture,
}

/// Settings shared by every subcommand. Each field may come from the config
/// file or from the flag of the same name; flags win.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunArgs {
    /// TOML file with any of the settings below.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Master seed; required.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Registered benchmark (linear3, plate, frame, linear<β>).
    #[arg(long)]
    pub benchmark: Option<String>,
    /// External performance model command, run through the system shell.
    #[arg(long)]
    pub model_command: Option<String>,
    /// Points sent to the external model per invocation.
    #[arg(long)]
    pub model_batch: Option<usize>,
    /// One dataset file per input variable, in variable order.
    #[arg(long = "data", num_args = 1..)]
    pub data: Option<Vec<PathBuf>>,
    /// Draw datasets of this size from the benchmark's true inputs.
    #[arg(long)]
    pub synthetic: Option<usize>,
    /// Previously written pool documents, one per variable.
    #[arg(long = "pools", num_args = 1..)]
    pub pools: Option<Vec<PathBuf>>,
    /// Candidate families (default: all seven).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    pub families: Option<Vec<String>>,
    /// Posterior draws per family (default 10000).
    #[arg(long)]
    pub n_theta: Option<usize>,
    /// Candidate models drawn from the pools (default 1000).
    #[arg(long)]
    pub n_c: Option<usize>,
    /// Mixture components per variable (default 500).
    #[arg(long)]
    pub n_mix: Option<usize>,
    /// Subset simulation samples per level (default 1000).
    #[arg(long)]
    pub samples_per_level: Option<usize>,
    /// Conditional level probability (default 0.1).
    #[arg(long)]
    pub p0: Option<f64>,
    /// Level limit before a run is reported as not converged (default 20).
    #[arg(long)]
    pub max_levels: Option<usize>,
    /// Stretch-move scale a (default 2).
    #[arg(long)]
    pub stretch_scale: Option<f64>,
    /// raw | self-normalized
    #[arg(long)]
    pub weight_mode: Option<WeightMode>,
    #[arg(long, value_enum)]
    pub candidate_source: Option<CandidateSource>,
    /// Largest candidate count the oracle accepts.
    #[arg(long)]
    pub oracle_cap: Option<usize>,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory (default isus-out).
    #[arg(long, short = 'o')]
    pub output_dir: Option<PathBuf>,
}

impl RunArgs {
    fn overlay(self, flags: RunArgs) -> RunArgs {
        macro_rules! pick {
            ($($f:ident),*) => {
                RunArgs {
                    config: flags.config,
                    $($f: flags.$f.or(self.$f),)*
                }
            };
        }
        pick!(
            seed, benchmark, model_command, model_batch, data, synthetic, pools, families, n_theta, n_c, n_mix,
            samples_per_level, p0, max_levels, stretch_scale, weight_mode, candidate_source, oracle_cap, workers,
            output_dir
        )
    }

    /// Merge the config file (if any) under the flags and validate.
    pub fn resolve(self) -> anyhow::Result<RunConfig> {
        let merged = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
                let file: RunArgs = toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))?;
                let base = path.parent().unwrap_or(Path::new(""));
                file.relative_to(base).overlay(self)
            }
            None => self,
        };
        RunConfig::from_args(merged)
    }

    /// Paths in a config file are relative to the file.
    fn relative_to(mut self, base: &Path) -> RunArgs {
        let fix = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        self.data = self.data.map(|v| v.into_iter().map(fix).collect());
        self.pools = self.pools.map(|v| v.into_iter().map(fix).collect());
        self.output_dir = self.output_dir.map(fix);
        self
    }
}

/// Fully resolved settings, embedded in every output document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub seed: u64,
    pub benchmark: Option<String>,
    pub model_command: Option<String>,
    pub model_batch: usize,
    pub data: Vec<PathBuf>,
    pub synthetic: Option<usize>,
    pub pools: Vec<PathBuf>,
    pub families: Vec<FamilyTag>,
    pub n_theta: usize,
    pub n_c: usize,
    pub n_mix: usize,
    pub samples_per_level: usize,
    pub p0: f64,
    pub max_levels: usize,
    pub stretch_scale: f64,
    pub weight_mode: WeightMode,
    pub candidate_source: CandidateSource,
    pub oracle_cap: usize,
    pub output_dir: PathBuf,
    /// Not serialized: output must not depend on it.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl RunConfig {
    fn from_args(a: RunArgs) -> anyhow::Result<Self> {
        let Some(seed) = a.seed else {
            bail!("a master seed is required (--seed or `seed` in the config file)");
        };
        let families = match a.families {
            Some(names) => names.iter().map(|n| n.parse()).collect::<Result<Vec<FamilyTag>, _>>()?,
            None => FamilyTag::ALL.to_vec(),
        };
        let defaults = SusConfig::default();
        let cfg = RunConfig {
            seed,
            benchmark: a.benchmark,
            model_command: a.model_command,
            model_batch: a.model_batch.unwrap_or(256),
            data: a.data.unwrap_or_default(),
            synthetic: a.synthetic,
            pools: a.pools.unwrap_or_default(),
            families,
            n_theta: a.n_theta.unwrap_or(InferenceConfig::default().n_theta),
            n_c: a.n_c.unwrap_or(1000),
            n_mix: a.n_mix.unwrap_or(DEFAULT_N_MIX),
            samples_per_level: a.samples_per_level.unwrap_or(defaults.samples_per_level),
            p0: a.p0.unwrap_or(defaults.p0),
            max_levels: a.max_levels.unwrap_or(defaults.max_levels),
            stretch_scale: a.stretch_scale.unwrap_or(defaults.stretch_scale),
            weight_mode: a.weight_mode.unwrap_or_default(),
            candidate_source: a.candidate_source.unwrap_or_default(),
            oracle_cap: a.oracle_cap.unwrap_or(DEFAULT_CANDIDATE_CAP),
            output_dir: a.output_dir.unwrap_or_else(|| PathBuf::from("isus-out")),
            workers: a.workers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        if let Some(name) = &self.benchmark {
            Benchmark::by_name(name)?;
        }
        if self.benchmark.is_some() && self.model_command.is_some() {
            bail!("give either a benchmark or an external model command, not both");
        }
        if self.synthetic.is_some() && self.benchmark.is_none() {
            bail!("synthetic datasets need a benchmark to draw from");
        }
        if self.synthetic == Some(0) || self.model_batch == 0 || self.n_theta == 0 || self.n_c == 0 || self.n_mix == 0 {
            bail!("counts (synthetic, model-batch, n-theta, n-c, n-mix) must be positive");
        }
        if self.workers == Some(0) {
            bail!("--workers must be positive");
        }
        self.isus_config().validate()?;
        Ok(())
    }

    pub fn master_seed(&self) -> MasterSeed {
        MasterSeed(self.seed)
    }

    pub fn isus_config(&self) -> IsusConfig {
        IsusConfig {
            seed: self.master_seed(),
            inference: InferenceConfig {
                families: self.families.clone(),
                n_theta: self.n_theta,
                ..InferenceConfig::default()
            },
            n_mix: self.n_mix,
            n_c: self.n_c,
            sus: SusConfig {
                samples_per_level: self.samples_per_level,
                p0: self.p0,
                max_levels: self.max_levels,
                stretch_scale: self.stretch_scale,
                seed: self.master_seed(),
            },
            weight_mode: self.weight_mode,
        }
    }
}

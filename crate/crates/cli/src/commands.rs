//! Subcommand implementations.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use isus_core::benchmarks::{mc_oracle, Benchmark, McEstimate};
use isus_core::density::JointDensity;
use isus_core::oracle::{check_cap, compare_ecdf, repeated_sus, EcdfComparison, OracleReport};
use isus_core::pipeline::{candidate_set, fit_pools, optimal_density, run_isus, synthetic_datasets, IsusConfig, IsusResult};
use isus_core::reweight::{reweight_all, FailureSummary};
use isus_core::stats::Ecdf;
use isus_core::sus::{cov_estimate, run_sus};
use isus_core::{Dataset, FailureDistribution, ModelPool, SamplingDensity, WeightMode};
use log::info;
use serde::{Deserialize, Serialize};

use crate::config::{CandidateSource, RunArgs, RunConfig};
use crate::io::{
    dataset_text, document_kind, ecdf_table, output_path, read_dataset, read_document, write_document, write_text,
    Document,
};
use crate::model::{ExternalModel, Problem};

/// A command failure with its exit code.
#[derive(Debug)]
pub enum Failure {
    Config(anyhow::Error),
    Data(anyhow::Error),
    NotConverged(String),
    Other(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Other(_) => 1,
            Failure::Config(_) => 2,
            Failure::Data(_) => 3,
            Failure::NotConverged(_) => 4,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration: {e:#}"),
            Failure::Data(e) => write!(f, "data: {e:#}"),
            Failure::NotConverged(what) => write!(f, "not converged: {what} (outputs were written)"),
            Failure::Other(e) => write!(f, "{e:#}"),
        }
    }
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Other(e.into())
    }
}

trait Classify<T> {
    fn config(self) -> Result<T, Failure>;
    fn data(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> Classify<T> for Result<T, E> {
    fn config(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Config(e.into()))
    }

    fn data(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Data(e.into()))
    }
}

type CmdResult = Result<(), Failure>;

fn setup(args: RunArgs) -> Result<RunConfig, Failure> {
    let cfg = args.resolve().config()?;
    if let Some(workers) = cfg.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .context("configuring the worker pool")
            .config()?;
    }
    Ok(cfg)
}

fn problem(cfg: &RunConfig) -> Result<Problem, Failure> {
    match (&cfg.benchmark, &cfg.model_command) {
        (Some(name), _) => Ok(Problem::Benchmark(Benchmark::by_name(name).config()?)),
        (None, Some(command)) => Ok(Problem::External(ExternalModel {
            command: command.clone(),
            batch: cfg.model_batch,
        })),
        (None, None) => Err(Failure::Config(anyhow!(
            "this command needs a performance function: --benchmark or --model-command"
        ))),
    }
}

fn has_inputs(cfg: &RunConfig) -> bool {
    !cfg.pools.is_empty() || !cfg.data.is_empty() || cfg.synthetic.is_some()
}

/// Datasets from files or drawn from the benchmark truth; synthetic ones are
/// written to the output directory.
fn datasets(cfg: &RunConfig) -> Result<Vec<Dataset>, Failure> {
    if let Some(n) = cfg.synthetic {
        if !cfg.data.is_empty() {
            return Err(Failure::Config(anyhow!("give either --data or --synthetic, not both")));
        }
        let bench = Benchmark::by_name(cfg.benchmark.as_deref().unwrap_or_default()).config()?;
        let data = synthetic_datasets(&bench.truth(), &bench.variables(), n, cfg.master_seed()).data()?;
        for d in &data {
            write_text(&output_path(cfg, &format!("data-{}.csv", d.name)), &dataset_text(d, cfg.seed))?;
        }
        return Ok(data);
    }
    if cfg.data.is_empty() {
        return Err(Failure::Config(anyhow!("no data: give --data files, --synthetic or --pools")));
    }
    cfg.data.iter().map(|p| read_dataset(p)).collect::<anyhow::Result<_>>().data()
}

fn check_dimension(problem: Option<&Problem>, count: usize) -> CmdResult {
    if let Some(Problem::Benchmark(b)) = problem {
        if b.dim() != count {
            return Err(Failure::Config(anyhow!(
                "benchmark {b} has {} input variables ({}), got {count} datasets",
                b.dim(),
                b.variables().join(", ")
            )));
        }
    }
    Ok(())
}

/// Load pool documents, or fit them from the datasets.
fn pools(cfg: &RunConfig, problem: Option<&Problem>) -> Result<Vec<ModelPool>, Failure> {
    if !cfg.pools.is_empty() {
        let pools: Vec<ModelPool> = cfg
            .pools
            .iter()
            .map(|p| read_document::<ModelPool>(p).map(|d| d.body))
            .collect::<anyhow::Result<_>>()
            .data()?;
        check_dimension(problem, pools.len())?;
        return Ok(pools);
    }
    let data = datasets(cfg)?;
    check_dimension(problem, data.len())?;
    let isus = cfg.isus_config();
    let pools = fit_pools(&data, &isus.inference, isus.seed).data()?;
    for p in &pools {
        info!("{}: {} families fitted, {} skipped", p.variable, p.fitted.len(), p.skipped.len());
    }
    Ok(pools)
}

fn probability_table(pools: &[ModelPool]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<16} {:<17} {:>14} {:>14} {:>10} {:>8} {:>7}",
        "variable", "family", "loglik", "AICc", "delta", "prob", "cloud"
    );
    for pool in pools {
        for f in &pool.fitted {
            let cloud = pool.cloud(f.family).map(|c| c.samples.len()).unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<16} {:<17} {:>14.4} {:>14.4} {:>10.4} {:>8.4} {:>7}",
                pool.variable,
                f.family.name(),
                f.loglik,
                f.aicc,
                f.delta,
                f.prob,
                cloud
            );
        }
        for s in &pool.skipped {
            let _ = writeln!(out, "{:<16} {:<17} skipped: {}", pool.variable, s.family.name(), s.reason);
        }
        if pool.aic_fallback {
            let _ = writeln!(out, "{:<16} (plain AIC: sample too small for AICc)", pool.variable);
        }
    }
    out
}

fn probability_csv(pools: &[ModelPool], seed: u64) -> String {
    let mut out = format!("# model probabilities, seed {seed}\nvariable,n,family,loglik,aic,aicc,delta,prob\n");
    for pool in pools {
        for f in &pool.fitted {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                pool.variable,
                pool.n,
                f.family.name(),
                f.loglik,
                f.aic,
                f.aicc,
                f.delta,
                f.prob
            );
        }
    }
    out
}

pub fn fit(args: RunArgs) -> CmdResult {
    let cfg = setup(args)?;
    let problem = cfg.benchmark.as_ref().map(|_| problem(&cfg)).transpose()?;
    let pools = pools(&cfg, problem.as_ref())?;
    for p in &pools {
        write_document(&output_path(&cfg, &format!("pool-{}.json", p.variable)), "pool", &cfg, p)?;
    }
    write_text(&output_path(&cfg, "model-probabilities.csv"), &probability_csv(&pools, cfg.seed))?;
    print!("{}", probability_table(&pools));
    Ok(())
}

/// Headline numbers of an `isus` run.
#[derive(Debug, Serialize, Deserialize)]
pub struct IsusSummary {
    pub pf_baseline: f64,
    pub cov_baseline: f64,
    pub levels: usize,
    pub thresholds: Vec<f64>,
    pub converged: bool,
    pub g_evaluations: u64,
    pub weight_mode: WeightMode,
    pub candidates: usize,
    pub failure: FailureSummary,
}

fn mixture_identity(problem: &Problem, pools: &[ModelPool], isus: &IsusConfig) -> Result<IsusResult, Failure> {
    let density: JointDensity = optimal_density(pools, isus.n_mix, isus.seed)?;
    let run = run_sus(problem, SamplingDensity::Mixture(density.clone()), &isus.sus_config())?;
    let distribution = reweight_all(&run, std::slice::from_ref(&density), isus.weight_mode)?;
    Ok(IsusResult {
        density,
        candidates: Vec::new(),
        run,
        distribution,
    })
}

pub fn isus(args: RunArgs) -> CmdResult {
    let cfg = setup(args)?;
    let problem = problem(&cfg)?;
    let pools = pools(&cfg, Some(&problem))?;
    let isus = cfg.isus_config();
    let result = match cfg.candidate_source {
        CandidateSource::Pools => run_isus(&problem, &pools, &isus)?,
        CandidateSource::Mixture => mixture_identity(&problem, &pools, &isus)?,
    };
    let run = &result.run;
    let summary = IsusSummary {
        pf_baseline: run.pf_baseline,
        cov_baseline: run.cov_baseline,
        levels: run.n_levels(),
        thresholds: run.thresholds(),
        converged: run.converged,
        g_evaluations: run.g_evaluations,
        weight_mode: cfg.weight_mode,
        candidates: result.distribution.values.len(),
        failure: result.distribution.summary.clone(),
    };
    write_document(&output_path(&cfg, "sus-run.json"), "sus-run", &cfg, run)?;
    write_document(&output_path(&cfg, "distribution.json"), "distribution", &cfg, &result.distribution)?;
    write_document(&output_path(&cfg, "summary.json"), "summary", &cfg, &summary)?;
    let comments = vec![
        format!("re-weighted failure probabilities, seed {}", cfg.seed),
        format!("weight mode {}, {} candidates", cfg.weight_mode, summary.candidates),
    ];
    write_text(
        &output_path(&cfg, "ecdf.csv"),
        &ecdf_table("isus", &result.distribution.ecdf, &comments),
    )?;
    print_isus(&summary);
    if !run.converged {
        return Err(Failure::NotConverged(format!("subset simulation stopped after {} levels", run.n_levels())));
    }
    Ok(())
}

fn print_isus(s: &IsusSummary) {
    let f = &s.failure;
    println!(
        "baseline P_F {:.4e} (c.o.v. {:.3}), {} levels, {} g evaluations",
        s.pf_baseline, s.cov_baseline, s.levels, s.g_evaluations
    );
    println!(
        "{} candidates ({}): median {:.4e}, 5% {:.4e}, 95% {:.4e}, mean {:.4e}",
        s.candidates, s.weight_mode, f.median, f.q05, f.q95, f.mean
    );
    if f.zero_count > 0 || !f.unreliable.is_empty() || f.clipped_count > 0 {
        println!(
            "{} zero estimates, {} clipped at 1, {} with effective sample size below 10",
            f.zero_count,
            f.clipped_count,
            f.unreliable.len()
        );
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SusRecord {
    pub run: u64,
    pub pf: f64,
    pub cov: f64,
    pub levels: usize,
    pub thresholds: Vec<f64>,
    pub g_evaluations: u64,
    pub converged: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SusBody {
    pub density: String,
    pub runs: Vec<SusRecord>,
    pub mean: f64,
    /// Sample c.o.v. across runs (absent for a single run).
    pub cov_across_runs: Option<f64>,
}

pub fn sus(args: RunArgs, runs: u64) -> CmdResult {
    let cfg = setup(args)?;
    if runs == 0 {
        return Err(Failure::Config(anyhow!("--runs must be positive")));
    }
    let problem = problem(&cfg)?;
    let (density, label) = if has_inputs(&cfg) {
        let pools = pools(&cfg, Some(&problem))?;
        let q = optimal_density(&pools, cfg.n_mix, cfg.master_seed())?;
        (SamplingDensity::Mixture(q), "optimal mixture")
    } else {
        let bench = problem.benchmark().ok_or_else(|| {
            Failure::Config(anyhow!("an external model has no true inputs: give --data, --synthetic or --pools"))
        })?;
        (SamplingDensity::Candidate(bench.truth()), "true inputs")
    };
    let base = cfg.isus_config().sus_config();
    let records: Vec<SusRecord> = (0..runs)
        .map(|r| {
            let run_cfg = isus_core::SusConfig {
                seed: cfg.master_seed().child("sus-run", &[r]),
                ..base.clone()
            };
            let run = run_sus(&problem, density.clone(), &run_cfg)?;
            Ok(SusRecord {
                run: r,
                pf: run.pf_baseline,
                cov: cov_estimate(&run),
                levels: run.n_levels(),
                thresholds: run.thresholds(),
                g_evaluations: run.g_evaluations,
                converged: run.converged,
            })
        })
        .collect::<Result<_, isus_core::Error>>()?;
    let pfs: Vec<f64> = records.iter().map(|r| r.pf).collect();
    let mean = isus_core::stats::mean(&pfs);
    let body = SusBody {
        density: label.to_string(),
        mean,
        cov_across_runs: (pfs.len() > 1).then(|| isus_core::stats::std_dev(&pfs) / mean),
        runs: records,
    };
    write_document(&output_path(&cfg, "sus.json"), "sus", &cfg, &body)?;
    for r in &body.runs {
        println!(
            "run {}: P_F {:.4e} (c.o.v. {:.3}), {} levels, {} g evaluations{}",
            r.run,
            r.pf,
            r.cov,
            r.levels,
            r.g_evaluations,
            if r.converged { "" } else { ", not converged" }
        );
    }
    if let Some(c) = body.cov_across_runs {
        println!("mean P_F {:.4e}, c.o.v. across runs {c:.3}", body.mean);
    }
    let stuck = body.runs.iter().filter(|r| !r.converged).count();
    if stuck > 0 {
        return Err(Failure::NotConverged(format!("{stuck} of {runs} runs")));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct OracleBody {
    pub report: OracleReport,
    pub summary: FailureSummary,
}

fn load_values(path: &Path) -> anyhow::Result<(String, Vec<f64>)> {
    let kind = document_kind(path)?;
    let values = match kind.as_str() {
        "distribution" => read_document::<FailureDistribution>(path)?.body.values,
        "oracle" => read_document::<OracleBody>(path)?.body.report.values,
        "sus" => read_document::<SusBody>(path)?.body.runs.iter().map(|r| r.pf).collect(),
        other => anyhow::bail!("{}: a '{other}' document holds no failure probabilities", path.display()),
    };
    Ok((kind, values))
}

pub fn oracle(args: RunArgs, compare: Option<PathBuf>) -> CmdResult {
    let cfg = setup(args)?;
    check_cap(cfg.n_c, cfg.oracle_cap).config()?;
    let problem = problem(&cfg)?;
    let pools = pools(&cfg, Some(&problem))?;
    let isus = cfg.isus_config();
    let candidates = candidate_set(&pools, isus.n_c, isus.seed)?;
    let report = repeated_sus(&problem, &candidates, &isus.sus_config(), cfg.oracle_cap)?;
    let distribution = report.distribution()?;
    info!(
        "oracle: {} runs, {} g evaluations in {:.1} s",
        report.values.len(),
        report.g_evaluations,
        report.wall_clock.as_secs_f64()
    );
    let stuck = report.converged.iter().filter(|c| !**c).count();
    let body = OracleBody {
        summary: distribution.summary.clone(),
        report,
    };
    write_document(&output_path(&cfg, "oracle.json"), "oracle", &cfg, &body)?;
    let comments = vec![format!("repeated subset simulation, seed {}", cfg.seed)];
    write_text(
        &output_path(&cfg, "oracle-ecdf.csv"),
        &ecdf_table("oracle", &distribution.ecdf, &comments),
    )?;
    let s = &body.summary;
    println!(
        "{} candidates, {} g evaluations: median {:.4e}, 5% {:.4e}, 95% {:.4e}",
        s.count, body.report.g_evaluations, s.median, s.q05, s.q95
    );
    if let Some(path) = compare {
        let (_, values) = load_values(&path).data()?;
        let other = Ecdf::new(&values).data()?;
        let cmp: EcdfComparison = compare_ecdf(&other, &distribution.ecdf);
        write_document(&output_path(&cfg, "comparison.json"), "comparison", &cfg, &cmp)?;
        println!(
            "against {}: log10 median difference {:+.3}, KS {:.3}, 90% width ratio {:.2}, band overlap {:.2}",
            path.display(),
            cmp.log10_median_diff,
            cmp.ks,
            cmp.width_ratio,
            cmp.band_overlap
        );
    }
    if stuck > 0 {
        return Err(Failure::NotConverged(format!("{stuck} oracle runs")));
    }
    Ok(())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct BenchBody {
    pub benchmark: String,
    pub estimate: McEstimate,
    pub reference_pf: f64,
}

pub fn bench(
    name: &str,
    n: u64,
    seed: u64,
    workers: Option<usize>,
    output: Option<PathBuf>,
    record: Option<PathBuf>,
) -> CmdResult {
    let cfg = setup(RunArgs {
        seed: Some(seed),
        benchmark: Some(name.to_string()),
        workers,
        ..RunArgs::default()
    })?;
    if n == 0 {
        return Err(Failure::Config(anyhow!("the sample count must be positive")));
    }
    let bench = Benchmark::by_name(name).config()?;
    let estimate = mc_oracle(&bench, &bench.truth(), n, cfg.master_seed())?;
    let cov = estimate.cov.map(|c| format!("{c:.3}")).unwrap_or_else(|| "n/a".into());
    println!(
        "{bench}: P_F = {:.4e} (c.o.v. {cov}, {} failures in {n}), reference {:.4e}",
        estimate.pf,
        estimate.failures,
        bench.reference_pf()
    );
    if let Some(path) = record {
        match &bench {
            Benchmark::Frame { record } => write_text(&path, &record.to_delimited())?,
            _ => return Err(Failure::Config(anyhow!("only the frame benchmark has a ground-motion record"))),
        }
    }
    if let Some(path) = output {
        let body = BenchBody {
            benchmark: bench.name(),
            reference_pf: bench.reference_pf(),
            estimate,
        };
        write_document(&path, "bench", &cfg, &body)?;
    }
    Ok(())
}

pub fn export_plot(inputs: &[PathBuf], output: &Path) -> CmdResult {
    let mut out = String::from("# empirical CDFs of failure probabilities\n");
    let mut rows = String::from("label,pf,ecdf\n");
    for path in inputs {
        let (kind, values) = load_values(path).data()?;
        let doc: Document<serde_json::Value> = read_document(path).data()?;
        let label = path.file_stem().and_then(|s| s.to_str()).unwrap_or(&kind).to_string();
        let ecdf = Ecdf::new(&values).data()?;
        let _ = writeln!(
            out,
            "# {label}: {kind}, seed {}, {} values, median {:e}",
            doc.config.seed,
            ecdf.len(),
            ecdf.median()
        );
        for (x, f) in ecdf.steps() {
            let _ = writeln!(rows, "{label},{x:e},{f}");
        }
    }
    out.push_str(&rows);
    write_text(output, &out)?;
    Ok(())
}

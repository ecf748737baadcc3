//! Importance re-weighting of one subset simulation for many candidate input
//! models.
//!
//! For candidate `p_j` and a level with samples `x_k` drawn under the
//! sampling density `q`, each sample carries `w = p_j(x_k)/q(x_k)`. The
//! conditional probability of the next subset is `P_ij = (1/N_i) Σ w·I(g ≤ b)`
//! (raw) or `Σ w·I / Σ w` (self-normalized), and `P_Fj = Π_i P_ij`.
//!
//! Level `i > 1` samples follow `q` conditioned on the previous subset, so the
//! raw mean estimates `P_p(F_{i+1}) / P_q(F_i)` and the product carries the
//! factor `Π P_p(F_i)/P_q(F_i)`. The self-normalized ratio estimates
//! `P_p(F_{i+1}) / P_p(F_i)` and the product telescopes to `P_p(F_m)`, which
//! is why it is the default.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{LogDensity, LN_DENSITY_FLOOR};
use crate::error::{Error, Result};
use crate::stats::Ecdf;
use crate::sus::{Level, SusRun};

/// Candidates whose smallest per-level effective sample size falls below
/// this are flagged unreliable.
pub const MIN_RELIABLE_ESS: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeightMode {
    /// `(1/N_i) Σ w·I`.
    Raw,
    /// `Σ w·I / Σ w`.
    #[default]
    SelfNormalized,
}

impl WeightMode {
    pub fn name(self) -> &'static str {
        match self {
            WeightMode::Raw => "raw",
            WeightMode::SelfNormalized => "self-normalized",
        }
    }
}

impl fmt::Display for WeightMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for WeightMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "raw" => Ok(WeightMode::Raw),
            "self-normalized" | "self-normalised" | "sn" => Ok(WeightMode::SelfNormalized),
            other => Err(Error::InvalidArgument(format!("unknown weight mode '{other}'"))),
        }
    }
}

/// An importance weight and whether the sampling density underflowed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weight {
    pub value: f64,
    pub floored: bool,
}

/// `exp(ln p − ln q)`, with 0 when `p` vanishes and 0 plus the floored flag
/// when `q` is below the density floor.
pub fn weight_from_logs(ln_p: f64, ln_q: f64) -> Weight {
    if !(ln_q >= LN_DENSITY_FLOOR) {
        return Weight { value: 0.0, floored: true };
    }
    if ln_p == f64::NEG_INFINITY || ln_p.is_nan() {
        return Weight { value: 0.0, floored: false };
    }
    Weight {
        value: (ln_p - ln_q).exp(),
        floored: false,
    }
}

/// Importance weight of `x` for `candidate` under sampling density `q`.
pub fn importance_weight<C: LogDensity + ?Sized, Q: LogDensity + ?Sized>(x: &[f64], candidate: &C, q: &Q) -> Weight {
    weight_from_logs(candidate.ln_pdf(x), q.ln_pdf(x))
}

/// `(Σw)² / Σw²`, 0 when every weight is 0.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().sum();
    let s2: f64 = weights.iter().map(|w| w * w).sum();
    if s2 > 0.0 {
        s * s / s2
    } else {
        0.0
    }
}

/// One level re-weighted for one candidate.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedLevel {
    pub index: usize,
    pub weights: Vec<f64>,
    pub n: usize,
    pub prob: f64,
    pub floored_count: usize,
    pub ess: f64,
    /// Every weight was zero.
    pub degenerate: bool,
}

/// `P_ij` for one level, using the level's stored `ln q` values.
pub fn conditional_probability<C: LogDensity + ?Sized>(level: &Level, candidate: &C, mode: WeightMode) -> WeightedLevel {
    let mut floored_count = 0;
    let weights: Vec<f64> = level
        .samples
        .iter()
        .zip(&level.ln_q)
        .map(|(x, lq)| {
            let w = weight_from_logs(candidate.ln_pdf(x), *lq);
            floored_count += w.floored as usize;
            w.value
        })
        .collect();
    let hit: f64 = weights
        .iter()
        .zip(&level.g_values)
        .filter(|(_, g)| **g <= level.threshold)
        .map(|(w, _)| *w)
        .sum();
    let total: f64 = weights.iter().sum();
    let n = level.len();
    let prob = match mode {
        WeightMode::Raw => hit / n as f64,
        WeightMode::SelfNormalized if total > 0.0 => hit / total,
        WeightMode::SelfNormalized => 0.0,
    };
    WeightedLevel {
        index: level.index,
        ess: effective_sample_size(&weights),
        degenerate: total == 0.0,
        weights,
        n,
        prob,
        floored_count,
    }
}

/// Per-level diagnostics kept for each candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelDiagnostics {
    pub prob: f64,
    pub ess: f64,
    pub floored_count: usize,
    pub degenerate: bool,
}

/// `P_Fj` with its diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateEstimate {
    pub pf: f64,
    /// Product before clipping to `[0, 1]`.
    pub raw_product: f64,
    pub clipped: bool,
    pub floored_count: usize,
    pub min_ess: f64,
    pub unreliable: bool,
    pub levels: Vec<LevelDiagnostics>,
}

/// `P_Fj = Π_i P_ij`, clipped to `[0, 1]`.
pub fn failure_probability<C: LogDensity + ?Sized>(run: &SusRun, candidate: &C, mode: WeightMode) -> CandidateEstimate {
    let mut product = 1.0;
    let mut levels = Vec::with_capacity(run.levels.len());
    for level in &run.levels {
        let wl = conditional_probability(level, candidate, mode);
        product *= wl.prob;
        levels.push(LevelDiagnostics {
            prob: wl.prob,
            ess: wl.ess,
            floored_count: wl.floored_count,
            degenerate: wl.degenerate,
        });
    }
    let min_ess = levels.iter().map(|l| l.ess).fold(f64::INFINITY, f64::min);
    CandidateEstimate {
        pf: product.clamp(0.0, 1.0),
        raw_product: product,
        clipped: product > 1.0,
        floored_count: levels.iter().map(|l| l.floored_count).sum(),
        min_ess,
        unreliable: min_ess < MIN_RELIABLE_ESS,
        levels,
    }
}

/// Summary statistics of a set of failure probabilities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureSummary {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub q05: f64,
    pub q95: f64,
    pub min: f64,
    pub max: f64,
    pub zero_count: usize,
    pub clipped_count: usize,
    pub floored_samples: usize,
    /// Candidate indices whose minimum per-level ESS is below 10.
    pub unreliable: Vec<usize>,
}

/// The set `{P_Fj}` and its empirical CDF.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureDistribution {
    pub mode: Option<WeightMode>,
    /// One value per candidate, in candidate order.
    pub values: Vec<f64>,
    pub ecdf: Ecdf,
    pub summary: FailureSummary,
    pub estimates: Vec<CandidateEstimate>,
}

impl FailureDistribution {
    /// Build from plain values (no re-weighting diagnostics).
    pub fn from_values(values: Vec<f64>) -> Result<Self> {
        Self::assemble(None, values, Vec::new())
    }

    fn assemble(mode: Option<WeightMode>, values: Vec<f64>, estimates: Vec<CandidateEstimate>) -> Result<Self> {
        let ecdf = Ecdf::new(&values)?;
        let sorted = ecdf.sorted();
        let summary = FailureSummary {
            count: values.len(),
            mean: values.iter().sum::<f64>() / values.len() as f64,
            median: ecdf.median(),
            q05: ecdf.quantile(0.05),
            q95: ecdf.quantile(0.95),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
            zero_count: values.iter().filter(|v| **v == 0.0).count(),
            clipped_count: estimates.iter().filter(|e| e.clipped).count(),
            floored_samples: estimates.iter().map(|e| e.floored_count).sum(),
            unreliable: estimates
                .iter()
                .enumerate()
                .filter(|(_, e)| e.unreliable)
                .map(|(i, _)| i)
                .collect(),
        };
        Ok(FailureDistribution {
            mode,
            values,
            ecdf,
            summary,
            estimates,
        })
    }

    /// `q95 − q05` of the failure probabilities.
    pub fn width_90(&self) -> f64 {
        self.summary.q95 - self.summary.q05
    }
}

/// Re-weight `run` for every candidate, in parallel, gathering in candidate
/// order.
pub fn reweight_all<C: LogDensity>(run: &SusRun, candidates: &[C], mode: WeightMode) -> Result<FailureDistribution> {
    if candidates.is_empty() {
        return Err(Error::EmptyInput("candidates"));
    }
    let estimates: Vec<CandidateEstimate> = candidates
        .par_iter()
        .map(|c| failure_probability(run, c, mode))
        .collect();
    let values = estimates.iter().map(|e| e.pf).collect();
    FailureDistribution::assemble(Some(mode), values, estimates)
}

//! Monte Carlo studies: per-trial rows, aggregates, CSV and JSON output.

mod oracle;
mod studies;
pub mod verify;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::metric::{ModelParams, Sparsification};

pub use oracle::{exact_topology_distribution, longest_cycle_fraction, mean_longest_cycle_fraction};
pub use studies::{
    conjecture_probe, degree_study, proposition_study, scaling_study, topology_study, Regime, MAX_PAIR_DRAWS,
    NOT_APPLICABLE,
};

/// Named tolerance bands used by the studies' pass/fail summaries.
pub mod bands {
    /// `(one-vertex frequency) * 3n/2` must land in this interval.
    pub const ONE_VERTEX_RATIO: (f64, f64) = (0.8, 1.25);
    /// Mean genus over `n/2`.
    pub const MEAN_GENUS_RATIO: (f64, f64) = (0.9, 1.0);
    /// Distance of the mean top-degree fraction from the permutation oracle.
    pub const TOP_DEGREE_TOLERANCE: f64 = 0.03;
    /// Mean `diameter / log n` at the largest size.
    pub const DIAMETER_RATIO: (f64, f64) = (1.5, 2.4);
    /// Relative and absolute slack of dyadic over dense diameters.
    pub const SPARSIFICATION_SLACK: (f64, f64) = (0.1, 2.0);
    /// Largest acceptable Fail fraction of an exploration.
    pub const EXPLORATION_FAIL: f64 = 0.01;
    /// Smallest acceptable fraction of vertices near a high-degree vertex.
    pub const TINY_HUB_FRACTION: f64 = 0.99;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DiameterChoice {
    Exact,
    /// Sweep from this many top-degree centres and as many random corners.
    Sweep(usize),
}

impl std::str::FromStr for DiameterChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(DiameterChoice::Exact),
            "sweep" => Ok(DiameterChoice::Sweep(DEFAULT_SWEEP_SOURCES)),
            other => Err(Error::invalid(format!("unknown diameter mode `{other}`"))),
        }
    }
}

pub const DEFAULT_SWEEP_SOURCES: usize = 4;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub ns: Vec<usize>,
    pub trials: usize,
    pub base_seed: u64,
    pub params: ModelParams,
    pub sparsification: Sparsification,
    pub diameter: DiameterChoice,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
}

impl StudyConfig {
    pub fn new(ns: Vec<usize>, trials: usize, base_seed: u64, params: ModelParams) -> Self {
        StudyConfig {
            ns,
            trials,
            base_seed,
            params,
            sparsification: Sparsification::Dyadic,
            diameter: DiameterChoice::Sweep(DEFAULT_SWEEP_SOURCES),
            threads: None,
            output: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::invalid("trials must be at least 1"));
        }
        if self.ns.is_empty() || self.ns.contains(&0) {
            return Err(Error::invalid("n values must be positive"));
        }
        if self.threads == Some(0) {
            return Err(Error::invalid("threads must be at least 1"));
        }
        Ok(())
    }
}

/// SplitMix64 finaliser; a bijection on `u64`.
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of trial `trial` at size `n`. Distinct `(n, trial)` pairs with
/// `n, trial < 2^32` get distinct seeds for a fixed base.
pub fn trial_seed(base: u64, n: usize, trial: usize) -> u64 {
    let key = ((n as u64) << 32) | (trial as u64 & 0xFFFF_FFFF);
    mix64(base.wrapping_add(mix64(key)))
}

/// One trial. Study-specific fields stay `None` elsewhere.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub n: usize,
    pub trial: usize,
    pub seed: u64,
    pub vertices: usize,
    pub genus: usize,
    pub connected: bool,
    pub components: usize,
    pub d1: usize,
    pub d2: usize,
    pub diameter: Option<f64>,
    pub diameter_over_log_n: Option<f64>,
    /// The diameter was taken on the largest component only.
    pub largest_component_only: Option<bool>,
    pub lower_bound: Option<f64>,
    pub lower_bound_ok: Option<bool>,
    pub separation_ok: Option<bool>,
    pub large_outcome: Option<String>,
    pub large_verified: Option<bool>,
    pub small_outcome: Option<String>,
    pub small_verified: Option<bool>,
    pub tiny_outcome: Option<String>,
    pub tiny_verified: Option<bool>,
    pub hub_within_6: Option<bool>,
    pub attempts: Option<u64>,
    /// Wall time of the trial; reported in JSON only, so CSV rows stay
    /// byte-identical across runs.
    #[serde(skip)]
    pub elapsed_ms: f64,
}

fn opt<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map(T::to_string).unwrap_or_default()
}

impl TrialRow {
    fn field(&self, col: &str) -> String {
        match col {
            "n" => self.n.to_string(),
            "trial" => self.trial.to_string(),
            "seed" => self.seed.to_string(),
            "vertices" => self.vertices.to_string(),
            "genus" => self.genus.to_string(),
            "connected" => self.connected.to_string(),
            "components" => self.components.to_string(),
            "d1" => self.d1.to_string(),
            "d2" => self.d2.to_string(),
            "diameter" => opt(&self.diameter),
            "diameter_over_log_n" => opt(&self.diameter_over_log_n),
            "largest_component_only" => opt(&self.largest_component_only),
            "lower_bound" => opt(&self.lower_bound),
            "lower_bound_ok" => opt(&self.lower_bound_ok),
            "separation_ok" => opt(&self.separation_ok),
            "large_outcome" => opt(&self.large_outcome),
            "large_verified" => opt(&self.large_verified),
            "small_outcome" => opt(&self.small_outcome),
            "small_verified" => opt(&self.small_verified),
            "tiny_outcome" => opt(&self.tiny_outcome),
            "tiny_verified" => opt(&self.tiny_verified),
            "hub_within_6" => opt(&self.hub_within_6),
            "attempts" => opt(&self.attempts),
            other => unreachable!("unknown column {other}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub study: String,
    pub columns: Vec<String>,
    pub rows: Vec<TrialRow>,
    pub aggregates: Value,
    pub elapsed_ms: f64,
}

impl StudyReport {
    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for r in &self.rows {
            let fields: Vec<String> = self.columns.iter().map(|c| r.field(c)).collect();
            writeln!(s, "{}", fields.join(",")).unwrap();
        }
        s
    }

    /// Aggregates plus timings.
    pub fn to_json(&self) -> Value {
        json!({
            "study": self.study,
            "trials": self.rows.len(),
            "aggregates": self.aggregates,
            "timings": {
                "total_ms": self.elapsed_ms,
                "trial_ms": self.rows.iter().map(|r| r.elapsed_ms).collect::<Vec<_>>(),
            },
        })
    }

    /// Writes the CSV to `path` and the JSON summary next to it (same stem,
    /// `.json` extension), both atomically.
    pub fn write(&self, path: &Path) -> Result<PathBuf> {
        crate::io::write_atomic(path, self.to_csv().as_bytes())?;
        let json_path = path.with_extension("json");
        let text = serde_json::to_string_pretty(&self.to_json()).expect("serialisable summary");
        crate::io::write_atomic(&json_path, text.as_bytes())?;
        Ok(json_path)
    }
}

/// Runs `trial(n, index, seed)` for every configured `(n, index)`, in
/// parallel, and returns rows in `(n, index)` order.
pub(crate) fn run_trials<F>(config: &StudyConfig, trial: F) -> Result<Vec<TrialRow>>
where
    F: Fn(usize, usize, u64) -> Result<TrialRow> + Sync,
{
    config.validate()?;
    let work: Vec<(usize, usize)> = config
        .ns
        .iter()
        .flat_map(|&n| (0..config.trials).map(move |i| (n, i)))
        .collect();
    let go = || {
        work.par_iter()
            .map(|&(n, i)| {
                let start = std::time::Instant::now();
                let mut row = trial(n, i, trial_seed(config.base_seed, n, i))?;
                row.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
                Ok(row)
            })
            .collect::<Result<Vec<_>>>()
    };
    match config.threads {
        None => go(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::InvalidState(format!("thread pool: {e}")))?
            .install(go),
    }
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let k = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / k;
    if xs.len() < 2 {
        return (mean, f64::NAN);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (k - 1.0);
    (mean, (var / k).sqrt())
}

/// Frequency with binomial standard error.
pub fn frequency(hits: usize, total: usize) -> (f64, f64) {
    if total == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = hits as f64 / total as f64;
    (p, (p * (1.0 - p) / total as f64).sqrt())
}

/// Linear-interpolated quantile of a sorted sample.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

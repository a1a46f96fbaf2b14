//! Monte Carlo harness for the maximum interference `Z_S`.
//!
//! Trial `t` at size `n` always draws from the stream keyed by
//! `(master, n, t)`, and aggregation happens after all trials are collected
//! in index order, so results are identical for any thread count.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::generators::{
    equally_spaced, exponential_chain, exponential_chain_exact, exponential_gaps_from,
    uniform_points_from, GeneratorKind, Purpose, Seed,
};
use crate::interference::max_interference;
use crate::io::write_file;
use crate::model::from_gaps;
use crate::stats::{least_squares, mean, nearest_rank, sample_std, Proportion};

/// Largest chain that fits in `f64` with ratio 1/2.
const FLOAT_CHAIN_LIMIT: usize = 1075;
/// Exact chains cost O(n²) bits; beyond this they are refused.
pub const CHAIN_LIMIT: usize = 1 << 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub n_grid: Vec<usize>,
    pub trials: usize,
    /// Per-n trial budgets overriding `trials`.
    pub trial_overrides: BTreeMap<usize, usize>,
    pub seed: u64,
    pub generator: GeneratorKind,
}

impl ExperimentConfig {
    pub fn new(n_grid: Vec<usize>, trials: usize, seed: u64, generator: GeneratorKind) -> Self {
        ExperimentConfig {
            n_grid,
            trials,
            trial_overrides: BTreeMap::new(),
            seed,
            generator,
        }
    }

    pub fn with_override(mut self, n: usize, trials: usize) -> Self {
        self.trial_overrides.insert(n, trials);
        self
    }

    pub fn trials_for(&self, n: usize) -> usize {
        self.trial_overrides.get(&n).copied().unwrap_or(self.trials)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_grid.is_empty() {
            return Err(Error::InvalidParameter("n grid must not be empty".into()));
        }
        if let Some(&n) = self.n_grid.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidParameter(format!(
                "every n must be at least 2, got {n}"
            )));
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(
                "n grid must be strictly increasing".into(),
            ));
        }
        if self.trials == 0 || self.trial_overrides.values().any(|&t| t == 0) {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.generator == GeneratorKind::Chain {
            if let Some(&n) = self.n_grid.iter().find(|&&n| n > CHAIN_LIMIT) {
                return Err(Error::InvalidParameter(format!(
                    "chain generator supports n <= {CHAIN_LIMIT}, got {n}"
                )));
            }
        }
        Ok(())
    }
}

/// `Z_S` of one generated instance.
fn instance_max(kind: GeneratorKind, n: usize, seed: Seed) -> Result<usize> {
    match kind {
        GeneratorKind::Uniform => max_interference(&uniform_points_from(n, &mut seed.rng())),
        GeneratorKind::Expgaps => {
            max_interference(&from_gaps(&exponential_gaps_from(n, &mut seed.rng()))?)
        }
        GeneratorKind::Chain if n <= FLOAT_CHAIN_LIMIT => {
            max_interference(&exponential_chain(n, 0.5)?)
        }
        GeneratorKind::Chain => max_interference(&exponential_chain_exact(n, 2)?),
        GeneratorKind::Equal => max_interference(&equally_spaced(n)?),
    }
}

fn check_range(n: usize, z: usize) -> Result<usize> {
    if z < 1 || z > n - 1 {
        return Err(Error::Invariant(format!(
            "Z_S = {z} outside [1, {}] at n = {n}",
            n - 1
        )));
    }
    Ok(z)
}

/// Per-trial `Z_S` values at one grid size, in trial order.
pub fn sample_max_interference(config: &ExperimentConfig, n: usize) -> Result<Vec<usize>> {
    let trials = config.trials_for(n);
    if !config.generator.is_random() {
        let z = check_range(
            n,
            instance_max(config.generator, n, Seed::new(config.seed))?,
        )?;
        return Ok(vec![z; trials]);
    }
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = Seed::stream(config.seed, Purpose::Trial, n as u64, t as u64);
            check_range(n, instance_max(config.generator, n, seed)?)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub n: usize,
    pub trials: usize,
    pub mean: f64,
    pub std: f64,
    pub min: usize,
    pub p50: usize,
    pub p95: usize,
    pub p99: usize,
    pub max: usize,
    pub mean_over_sqrt_ln_n: f64,
    pub mean_over_sqrt_log2_n: f64,
}

impl AggregateRow {
    pub fn from_samples(n: usize, samples: &[usize]) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InvalidParameter("no samples to aggregate".into()));
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable();
        let values: Vec<f64> = samples.iter().map(|&z| z as f64).collect();
        let m = mean(&values);
        let nf = n as f64;
        Ok(AggregateRow {
            n,
            trials: samples.len(),
            mean: m,
            std: sample_std(&values),
            min: sorted[0],
            p50: nearest_rank(&sorted, 0.50),
            p95: nearest_rank(&sorted, 0.95),
            p99: nearest_rank(&sorted, 0.99),
            max: sorted[sorted.len() - 1],
            mean_over_sqrt_ln_n: m / nf.ln().sqrt(),
            mean_over_sqrt_log2_n: m / nf.log2().sqrt(),
        })
    }
}

/// Runs every grid size and aggregates. Invalid configs fail before any work.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<AggregateRow>> {
    config.validate()?;
    config
        .n_grid
        .iter()
        .map(|&n| AggregateRow::from_samples(n, &sample_max_interference(config, n)?))
        .collect()
}

/// Least-squares fit `mean Z_S = a * sqrt(ln n) + b`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    pub r2: f64,
    pub regressor: &'static str,
}

pub fn fit_scaling(rows: &[AggregateRow]) -> Result<ScalingFit> {
    let mut distinct: Vec<usize> = rows.iter().map(|r| r.n).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 || distinct[0] < 2 {
        return Err(Error::InvalidParameter(format!(
            "scaling fit needs at least 3 distinct n >= 2, got {}",
            distinct.len()
        )));
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln().sqrt()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.mean).collect();
    let line = least_squares(&xs, &ys);
    Ok(ScalingFit {
        a: line.slope,
        b: line.intercept,
        r2: line.r2,
        regressor: "sqrt_ln_n",
    })
}

/// Relative spread `(max - min) / min` of `mean / sqrt(ln n)` over the rows.
pub fn plateau_spread(rows: &[AggregateRow]) -> f64 {
    let ratios = rows.iter().map(|r| r.mean_over_sqrt_ln_n);
    let lo = ratios.clone().fold(f64::INFINITY, f64::min);
    let hi = ratios.fold(f64::NEG_INFINITY, f64::max);
    (hi - lo) / lo
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TailEstimate {
    pub n: usize,
    pub k: usize,
    pub trials: u64,
    pub hits: u64,
    pub fraction: f64,
    pub ci95: [f64; 2],
    pub min_observed: usize,
    pub max_observed: usize,
}

/// Fraction of uniform-model trials with `Z_S >= k`.
pub fn tail_estimate(n: usize, k: usize, trials: usize, master: u64) -> Result<TailEstimate> {
    if n < 2 {
        return Err(Error::TooFewPoints {
            required: 2,
            actual: n,
        });
    }
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be at least 1".into()));
    }
    let samples: Vec<usize> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = Seed::stream(master, Purpose::Tail, n as u64, t as u64);
            check_range(n, instance_max(GeneratorKind::Uniform, n, seed)?)
        })
        .collect::<Result<_>>()?;
    let hits = samples.iter().filter(|&&z| z >= k).count() as u64;
    let p = Proportion::new(hits, trials as u64);
    Ok(TailEstimate {
        n,
        k,
        trials: trials as u64,
        hits,
        fraction: p.fraction,
        ci95: p.ci95,
        min_observed: *samples.iter().min().expect("trials >= 1"),
        max_observed: *samples.iter().max().expect("trials >= 1"),
    })
}

/// Provenance written alongside exported rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunMetadata {
    pub generator: GeneratorKind,
    pub seed: u64,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub trial_overrides: BTreeMap<usize, usize>,
    pub version: &'static str,
}

impl RunMetadata {
    pub fn from_config(config: &ExperimentConfig) -> Self {
        RunMetadata {
            generator: config.generator,
            seed: config.seed,
            n_grid: config.n_grid.clone(),
            trials: config.trials,
            trial_overrides: config.trial_overrides.clone(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }
}

pub const ROWS_HEADER: &str =
    "n,trials,mean,std,min,p50,p95,p99,max,mean_over_sqrt_ln_n,mean_over_sqrt_log2_n";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Aggregate rows as CSV, followed by `# key=value` metadata lines.
pub fn rows_to_csv(rows: &[AggregateRow], meta: &RunMetadata) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to export".into()));
    }
    let mut out = String::new();
    writeln!(out, "{ROWS_HEADER}").unwrap();
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.n,
            r.trials,
            r.mean,
            r.std,
            r.min,
            r.p50,
            r.p95,
            r.p99,
            r.max,
            r.mean_over_sqrt_ln_n,
            r.mean_over_sqrt_log2_n
        )
        .unwrap();
    }
    let grid: Vec<String> = meta.n_grid.iter().map(usize::to_string).collect();
    let overrides: Vec<String> = meta
        .trial_overrides
        .iter()
        .map(|(n, t)| format!("{n}={t}"))
        .collect();
    writeln!(out, "# generator={}", meta.generator).unwrap();
    writeln!(out, "# seed={}", meta.seed).unwrap();
    writeln!(out, "# n_grid={}", grid.join(";")).unwrap();
    writeln!(out, "# trials={}", meta.trials).unwrap();
    writeln!(out, "# trial_overrides={}", overrides.join(";")).unwrap();
    writeln!(out, "# quantiles=nearest-rank").unwrap();
    writeln!(out, "# version={}", meta.version).unwrap();
    Ok(out)
}

pub fn rows_to_json(rows: &[AggregateRow], meta: &RunMetadata) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("no rows to export".into()));
    }
    #[derive(Serialize)]
    struct Doc<'a> {
        metadata: &'a RunMetadata,
        rows: &'a [AggregateRow],
    }
    Ok(serde_json::to_string_pretty(&Doc {
        metadata: meta,
        rows,
    })? + "\n")
}

pub fn fit_to_json(fit: &ScalingFit) -> Result<String> {
    Ok(serde_json::to_string_pretty(fit)? + "\n")
}

pub fn export_rows(
    rows: &[AggregateRow],
    meta: &RunMetadata,
    format: Format,
    path: &Path,
) -> Result<()> {
    let text = match format {
        Format::Csv => rows_to_csv(rows, meta)?,
        Format::Json => rows_to_json(rows, meta)?,
    };
    write_file(path, &text)
}

pub fn export_fit(fit: &ScalingFit, path: &Path) -> Result<()> {
    write_file(path, &fit_to_json(fit)?)
}

/// Parses the `n` and `mean` columns (and the rest) back from exported CSV.
pub fn parse_rows_csv(text: &str) -> Result<Vec<AggregateRow>> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let columns: Vec<&str> = header.split(',').map(str::trim).collect();
    let col = |name: &str| {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("missing column `{name}`"),
            })
    };
    let idx: Vec<usize> = [
        "n", "trials", "mean", "std", "min", "p50", "p95", "p99", "max",
    ]
    .iter()
    .map(|c| col(c))
    .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (i, line) in lines {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = |what: &str| Error::Parse {
            line: i + 1,
            message: format!("bad {what}"),
        };
        let get = |c: usize| fields.get(idx[c]).copied().ok_or_else(|| bad("row length"));
        let int = |c: usize, name: &str| get(c)?.parse::<usize>().map_err(|_| bad(name));
        let float = |c: usize, name: &str| get(c)?.parse::<f64>().map_err(|_| bad(name));
        let n = int(0, "n")?;
        let m = float(2, "mean")?;
        rows.push(AggregateRow {
            n,
            trials: int(1, "trials")?,
            mean: m,
            std: float(3, "std")?,
            min: int(4, "min")?,
            p50: int(5, "p50")?,
            p95: int(6, "p95")?,
            p99: int(7, "p99")?,
            max: int(8, "max")?,
            mean_over_sqrt_ln_n: m / (n as f64).ln().sqrt(),
            mean_over_sqrt_log2_n: m / (n as f64).log2().sqrt(),
        });
    }
    Ok(rows)
}

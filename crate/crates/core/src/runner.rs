//! Strategy comparisons and seed sweeps.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::engine::{run_simulation, SimResult};
use crate::error::{Error, Result};
use crate::routing::Strategy;

/// Outcome of one (strategy, seed) run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub strategy: Strategy,
    pub seed: u64,
    pub first_death: Option<u64>,
    pub last_death: Option<u64>,
    pub utility_pct: Option<f64>,
    pub truncated: bool,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
}

impl From<&SimResult> for RunRow {
    fn from(r: &SimResult) -> Self {
        Self {
            strategy: r.strategy,
            seed: r.seed,
            first_death: r.first_death_round,
            last_death: r.last_death_round,
            utility_pct: r.utility_pct,
            truncated: r.truncated,
            delivered: r.delivered,
            lost: r.lost,
            exceptions: r.exceptions,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    pub std: f64,
    /// Runs that contributed a value.
    pub count: usize,
}

impl MeanStd {
    /// Sample standard deviation; zero for a single value. `None` when empty.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self { mean, std, count: values.len() })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategySummary {
    pub strategy: Strategy,
    pub runs: usize,
    pub truncated_runs: usize,
    pub first_death: Option<MeanStd>,
    pub last_death: Option<MeanStd>,
    pub utility_pct: Option<MeanStd>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub rows: Vec<RunRow>,
    pub summaries: Vec<StrategySummary>,
}

impl Comparison {
    pub fn summary(&self, strategy: Strategy) -> Option<&StrategySummary> {
        self.summaries.iter().find(|s| s.strategy == strategy)
    }
}

/// Runs every strategy on every seed. A given seed yields the same topology
/// for all strategies. Rows come back sorted by (strategy, seed) no matter in
/// which order the runs finish.
pub fn run_compare(config: &SimConfig, strategies: &[Strategy], seeds: &[u64]) -> Result<Comparison> {
    if strategies.is_empty() {
        return Err(Error::config("strategies", "at least one strategy is required"));
    }
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed is required"));
    }
    config.validate()?;
    let strategies: BTreeSet<Strategy> = strategies.iter().copied().collect();
    let seeds: BTreeSet<u64> = seeds.iter().copied().collect();
    let jobs: Vec<(Strategy, u64)> =
        strategies.iter().flat_map(|&s| seeds.iter().map(move |&seed| (s, seed))).collect();

    let mut rows = jobs
        .par_iter()
        .map(|&(strategy, seed)| {
            let cfg = SimConfig { strategy, seed, trace_stride: 0, ..config.clone() };
            run_simulation(&cfg).map(|r| RunRow::from(&r))
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by_key(|r| (r.strategy, r.seed));

    let summaries = strategies
        .iter()
        .map(|&strategy| {
            let runs: Vec<&RunRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
            let collect = |f: &dyn Fn(&RunRow) -> Option<f64>| runs.iter().filter_map(|r| f(r)).collect::<Vec<_>>();
            StrategySummary {
                strategy,
                runs: runs.len(),
                truncated_runs: runs.iter().filter(|r| r.truncated).count(),
                first_death: MeanStd::of(&collect(&|r| r.first_death.map(|v| v as f64))),
                last_death: MeanStd::of(&collect(&|r| r.last_death.map(|v| v as f64))),
                utility_pct: MeanStd::of(&collect(&|r| r.utility_pct)),
            }
        })
        .collect();
    Ok(Comparison { rows, summaries })
}

/// Parses seed lists such as `1..10` (inclusive), `3,5,8` or `1..3,7`.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>> {
    let bad = |part: &str| Error::config("seeds", format!("cannot parse `{part}`"));
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((lo, hi)) = part.split_once("..") {
            let lo: u64 = lo.trim().parse().map_err(|_| bad(part))?;
            let hi: u64 = hi.trim().trim_start_matches('=').parse().map_err(|_| bad(part))?;
            if lo > hi {
                return Err(Error::config("seeds", format!("empty range `{part}`")));
            }
            seeds.extend(lo..=hi);
        } else {
            seeds.push(part.parse().map_err(|_| bad(part))?);
        }
    }
    if seeds.is_empty() {
        return Err(Error::config("seeds", "at least one seed is required"));
    }
    Ok(seeds)
}

pub fn parse_strategies(text: &str) -> Result<Vec<Strategy>> {
    let strategies = text
        .split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(str::parse)
        .collect::<Result<Vec<Strategy>>>()?;
    if strategies.is_empty() {
        return Err(Error::config("strategies", "at least one strategy is required"));
    }
    Ok(strategies)
}

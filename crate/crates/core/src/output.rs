//! Result files: summary, alive curve, energy trace and run manifest.
//!
//! CSV output is comma separated with a header row, `.` decimals and LF line
//! endings, so identical results serialize to identical bytes everywhere.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::config::SimConfig;
use crate::engine::SimResult;
use crate::error::{Error, Result};
use crate::routing::Strategy;
use crate::runner::{Comparison, MeanStd};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Format(format!("unknown output format `{s}` (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.extension())
    }
}

/// One line of a single-run summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub strategy: Strategy,
    pub seed: u64,
    pub nodes: usize,
    pub first_death: Option<u64>,
    pub last_death: Option<u64>,
    pub utility_pct: Option<f64>,
    pub rounds_run: u64,
    pub truncated: bool,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
    pub energy_used_uj: f64,
}

impl From<&SimResult> for RunSummary {
    fn from(r: &SimResult) -> Self {
        Self {
            strategy: r.strategy,
            seed: r.seed,
            nodes: r.nodes,
            first_death: r.first_death_round,
            last_death: r.last_death_round,
            utility_pct: r.utility_pct,
            rounds_run: r.rounds_run,
            truncated: r.truncated,
            delivered: r.delivered,
            lost: r.lost,
            exceptions: r.exceptions,
            energy_used_uj: r.ledger.total(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AlivePoint {
    pub round: u64,
    pub alive_count: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyPoint {
    pub round: u64,
    pub node_id: usize,
    pub energy_uj: f64,
}

/// A row of a comparison table: either one run (`row = run`) or the
/// per-strategy mean with standard deviations (`row = mean`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub row: String,
    pub strategy: Strategy,
    pub seed: Option<u64>,
    pub first_death: Option<f64>,
    pub last_death: Option<f64>,
    pub utility_pct: Option<f64>,
    pub first_death_std: Option<f64>,
    pub last_death_std: Option<f64>,
    pub utility_pct_std: Option<f64>,
    pub truncated: bool,
}

pub fn comparison_records(cmp: &Comparison) -> Vec<ComparisonRecord> {
    let runs = cmp.rows.iter().map(|r| ComparisonRecord {
        row: "run".into(),
        strategy: r.strategy,
        seed: Some(r.seed),
        first_death: r.first_death.map(|v| v as f64),
        last_death: r.last_death.map(|v| v as f64),
        utility_pct: r.utility_pct,
        first_death_std: None,
        last_death_std: None,
        utility_pct_std: None,
        truncated: r.truncated,
    });
    let mean = |m: Option<MeanStd>| m.map(|m| m.mean);
    let std = |m: Option<MeanStd>| m.map(|m| m.std);
    let summaries = cmp.summaries.iter().map(|s| ComparisonRecord {
        row: "mean".into(),
        strategy: s.strategy,
        seed: None,
        first_death: mean(s.first_death),
        last_death: mean(s.last_death),
        utility_pct: mean(s.utility_pct),
        first_death_std: std(s.first_death),
        last_death_std: std(s.last_death),
        utility_pct_std: std(s.utility_pct),
        truncated: s.truncated_runs > 0,
    });
    runs.chain(summaries).collect()
}

pub fn alive_points(result: &SimResult) -> Vec<AlivePoint> {
    result
        .alive_curve
        .iter()
        .enumerate()
        .map(|(i, &alive_count)| AlivePoint { round: i as u64 + 1, alive_count })
        .collect()
}

pub fn energy_points(result: &SimResult) -> Vec<EnergyPoint> {
    result
        .energy_trace
        .iter()
        .map(|s| EnergyPoint { round: s.round, node_id: s.node, energy_uj: s.energy })
        .collect()
}

/// Provenance attached to every output directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub timestamp_unix: u64,
    pub seed: u64,
    pub strategy: String,
    /// Every configuration key with its value; loadable via `--config`.
    pub config: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seeds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strategies: Option<Vec<Strategy>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology_file: Option<PathBuf>,
}

impl RunManifest {
    pub fn new(command: &str, config: &SimConfig) -> Self {
        let timestamp_unix = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        Self {
            artifact: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            timestamp_unix,
            seed: config.seed,
            strategy: config.strategy.to_string(),
            config: config.to_pairs().into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
            seeds: None,
            strategies: None,
            topology_file: None,
        }
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    for row in rows {
        w.serialize(row).map_err(csv_err)?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    reader.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })
}

fn prepare_dir(out_dir: &Path) -> Result<()> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))
}

/// Writes `summary.{csv,json}`, `alive_curve.csv`, `energy_trace.csv` and
/// `manifest.json` for a single run. Returns the paths written.
pub fn emit_run(result: &SimResult, manifest: &RunManifest, format: Format, out_dir: &Path) -> Result<Vec<PathBuf>> {
    prepare_dir(out_dir)?;
    let summary = out_dir.join(format!("summary.{}", format.extension()));
    let rows = [RunSummary::from(result)];
    match format {
        Format::Csv => write_csv(&summary, &rows)?,
        Format::Json => write_json(&summary, &rows)?,
    }
    let alive = out_dir.join("alive_curve.csv");
    write_csv(&alive, &alive_points(result))?;
    let trace = out_dir.join("energy_trace.csv");
    write_csv(&trace, &energy_points(result))?;
    let man = out_dir.join("manifest.json");
    write_json(&man, manifest)?;
    Ok(vec![summary, alive, trace, man])
}

/// Writes `summary.{csv,json}` and `manifest.json` for a comparison.
pub fn emit_comparison(
    cmp: &Comparison,
    manifest: &RunManifest,
    format: Format,
    out_dir: &Path,
) -> Result<Vec<PathBuf>> {
    prepare_dir(out_dir)?;
    let summary = out_dir.join(format!("summary.{}", format.extension()));
    match format {
        Format::Csv => write_csv(&summary, &comparison_records(cmp))?,
        Format::Json => write_json(&summary, cmp)?,
    }
    let man = out_dir.join("manifest.json");
    write_json(&man, manifest)?;
    Ok(vec![summary, man])
}

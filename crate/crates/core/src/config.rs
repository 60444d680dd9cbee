//! Simulation configuration and its flat `key=value` text form.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::radio::RadioParams;
use crate::routing::Strategy;

/// Relay queue capacity per node per round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QueueCapacity {
    /// As many packets as the link carries in one round.
    Auto,
    Limited(u64),
    Unbounded,
}

impl fmt::Display for QueueCapacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QueueCapacity::Auto => f.write_str("auto"),
            QueueCapacity::Limited(n) => write!(f, "{n}"),
            QueueCapacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl FromStr for QueueCapacity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "auto" => Ok(QueueCapacity::Auto),
            "unbounded" | "inf" | "infinite" => Ok(QueueCapacity::Unbounded),
            _ => s.parse().map(QueueCapacity::Limited).map_err(|e| format!("{e}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub radio: RadioParams,
    pub nodes: usize,
    pub area_side: f64,
    pub mean: f64,
    pub stddev: f64,
    pub seed: u64,
    pub strategy: Strategy,
    /// Relay refusal threshold as a fraction of `initial_energy`.
    pub threshold_fraction: f64,
    pub queue_capacity: QueueCapacity,
    pub max_rounds: u64,
    /// Energy trace sampling interval in rounds; 0 disables the trace.
    pub trace_stride: u64,
    /// When false, diffusion relays accept everything and never send exceptions.
    pub exceptions: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            radio: RadioParams::default(),
            nodes: 100,
            area_side: 100.0,
            mean: 50.0,
            stddev: 50.0,
            seed: 0,
            strategy: Strategy::Diffusion,
            threshold_fraction: 0.001,
            queue_capacity: QueueCapacity::Auto,
            max_rounds: 10_000_000,
            trace_stride: 1,
            exceptions: true,
        }
    }
}

pub const KEYS: &[&str] = &[
    "nodes",
    "area_side",
    "mean",
    "stddev",
    "seed",
    "strategy",
    "threshold_fraction",
    "queue_capacity",
    "max_rounds",
    "trace_stride",
    "exceptions",
    "e_tx_elec",
    "e_rx_elec",
    "eps_amp",
    "path_loss_exponent",
    "idle_power",
    "round_period",
    "link_bandwidth",
    "packet_bits",
    "ctrl_bits",
    "initial_energy",
];

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value.parse().map_err(|e| Error::config(key, format!("cannot parse `{value}`: {e}")))
}

impl SimConfig {
    /// Relay refusal threshold in µJ.
    pub fn threshold(&self) -> f64 {
        self.threshold_fraction * self.radio.initial_energy
    }

    /// Resolved queue capacity; `None` means unbounded.
    pub fn queue_cap(&self) -> Option<u64> {
        match self.queue_capacity {
            QueueCapacity::Auto => Some(self.radio.max_packets_per_round()),
            QueueCapacity::Limited(n) => Some(n),
            QueueCapacity::Unbounded => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.radio.validate()?;
        if self.nodes == 0 {
            return Err(Error::config("nodes", "must be > 0"));
        }
        if !(self.area_side.is_finite() && self.area_side > 0.0) {
            return Err(Error::config("area_side", format!("must be > 0, got {}", self.area_side)));
        }
        if !self.mean.is_finite() {
            return Err(Error::config("mean", "must be finite"));
        }
        if !(self.stddev.is_finite() && self.stddev > 0.0) {
            return Err(Error::config("stddev", format!("must be > 0, got {}", self.stddev)));
        }
        if !(0.0..=1.0).contains(&self.threshold_fraction) {
            return Err(Error::config(
                "threshold_fraction",
                format!("must lie in [0, 1], got {}", self.threshold_fraction),
            ));
        }
        if self.max_rounds == 0 {
            return Err(Error::config("max_rounds", "must be > 0"));
        }
        Ok(())
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let r = &mut self.radio;
        match key {
            "nodes" => self.nodes = parse_value(key, value)?,
            "area_side" => self.area_side = parse_value(key, value)?,
            "mean" => self.mean = parse_value(key, value)?,
            "stddev" => self.stddev = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            "strategy" => self.strategy = value.parse()?,
            "threshold_fraction" => self.threshold_fraction = parse_value(key, value)?,
            "queue_capacity" => self.queue_capacity = parse_value(key, value)?,
            "max_rounds" => self.max_rounds = parse_value(key, value)?,
            "trace_stride" => self.trace_stride = parse_value(key, value)?,
            "exceptions" => self.exceptions = parse_value(key, value)?,
            "e_tx_elec" => r.e_tx_elec = parse_value(key, value)?,
            "e_rx_elec" => r.e_rx_elec = parse_value(key, value)?,
            "eps_amp" => r.eps_amp = parse_value(key, value)?,
            "path_loss_exponent" => r.path_loss_exponent = parse_value(key, value)?,
            "idle_power" => r.idle_power = parse_value(key, value)?,
            "round_period" => r.round_period = parse_value(key, value)?,
            "link_bandwidth" => r.link_bandwidth = parse_value(key, value)?,
            "packet_bits" => r.packet_bits = parse_value(key, value)?,
            "ctrl_bits" => r.ctrl_bits = parse_value(key, value)?,
            "initial_energy" => r.initial_energy = parse_value(key, value)?,
            _ => {
                return Err(Error::UnknownKey { key: key.to_string(), valid: KEYS.join(", ") });
            }
        }
        Ok(())
    }

    /// Every setting as `(key, value)` in [`KEYS`] order. Feeding these back
    /// through [`SimConfig::set`] reproduces the configuration exactly.
    pub fn to_pairs(&self) -> Vec<(&'static str, String)> {
        let r = &self.radio;
        KEYS.iter()
            .map(|&key| {
                let value = match key {
                    "nodes" => self.nodes.to_string(),
                    "area_side" => self.area_side.to_string(),
                    "mean" => self.mean.to_string(),
                    "stddev" => self.stddev.to_string(),
                    "seed" => self.seed.to_string(),
                    "strategy" => self.strategy.to_string(),
                    "threshold_fraction" => self.threshold_fraction.to_string(),
                    "queue_capacity" => self.queue_capacity.to_string(),
                    "max_rounds" => self.max_rounds.to_string(),
                    "trace_stride" => self.trace_stride.to_string(),
                    "exceptions" => self.exceptions.to_string(),
                    "e_tx_elec" => r.e_tx_elec.to_string(),
                    "e_rx_elec" => r.e_rx_elec.to_string(),
                    "eps_amp" => r.eps_amp.to_string(),
                    "path_loss_exponent" => r.path_loss_exponent.to_string(),
                    "idle_power" => r.idle_power.to_string(),
                    "round_period" => r.round_period.to_string(),
                    "link_bandwidth" => r.link_bandwidth.to_string(),
                    "packet_bits" => r.packet_bits.to_string(),
                    "ctrl_bits" => r.ctrl_bits.to_string(),
                    "initial_energy" => r.initial_energy.to_string(),
                    _ => unreachable!("KEYS and to_pairs out of sync"),
                };
                (key, value)
            })
            .collect()
    }

    /// `key=value` text, one setting per line.
    pub fn to_text(&self) -> String {
        self.to_pairs().into_iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Parses `key=value` settings separated by newlines or commas. `#` starts
    /// a comment. Unspecified keys keep their defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = SimConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("");
            for item in line.split(',') {
                let item = item.trim();
                if item.is_empty() {
                    continue;
                }
                let (key, value) = item
                    .split_once('=')
                    .ok_or_else(|| Error::Syntax { line: idx + 1, text: raw.trim().to_string() })?;
                config.set(key.trim(), value.trim())?;
            }
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let mut config = SimConfig::default();
        for (k, v) in map {
            config.set(k, v)?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// Reads a configuration file. A JSON run manifest is accepted as well, in
/// which case its `config` echo is used.
pub fn load_config(path: &Path) -> Result<SimConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    if text.trim_start().starts_with('{') {
        #[derive(Deserialize)]
        struct ManifestConfig {
            config: BTreeMap<String, String>,
        }
        let manifest: ManifestConfig =
            serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        return SimConfig::from_map(&manifest.config);
    }
    SimConfig::parse(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let c = SimConfig::parse("").unwrap();
        assert_eq!(c, SimConfig::default());
        assert_eq!(c.radio.initial_energy, 1.539e10);
        assert_eq!(c.nodes, 100);
        assert_eq!((c.area_side, c.mean, c.stddev), (100.0, 50.0, 50.0));
        assert_eq!(c.queue_cap(), Some(250));
        assert_eq!(c.threshold(), 0.001 * 1.539e10);
    }

    #[test]
    fn zero_nodes_rejected() {
        let err = SimConfig::parse("nodes=0").unwrap_err();
        assert!(matches!(err, Error::Config { ref field, .. } if field == "nodes"), "{err}");
    }

    #[test]
    fn overrides_on_one_line() {
        let c = SimConfig::parse("strategy=diffusion, seed=42").unwrap();
        assert_eq!(c, SimConfig { seed: 42, strategy: Strategy::Diffusion, ..SimConfig::default() });
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = SimConfig::parse("# full scale\n\nnodes = 10  # small\nstrategy=mte\n").unwrap();
        assert_eq!(c.nodes, 10);
        assert_eq!(c.strategy, Strategy::Mte);
    }

    #[test]
    fn unknown_key_lists_valid_keys() {
        let err = SimConfig::parse("speed=3").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("speed") && msg.contains("initial_energy"), "{msg}");
    }

    #[test]
    fn bad_values_name_the_field() {
        for (text, field) in [
            ("round_period=0", "round_period"),
            ("packet_bits=0", "packet_bits"),
            ("stddev=-1", "stddev"),
            ("threshold_fraction=1.5", "threshold_fraction"),
            ("max_rounds=0", "max_rounds"),
            ("nodes=abc", "nodes"),
        ] {
            match SimConfig::parse(text) {
                Err(Error::Config { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
        assert!(matches!(SimConfig::parse("strategy=leach"), Err(Error::UnknownStrategy(_))));
        assert!(matches!(SimConfig::parse("nodes"), Err(Error::Syntax { line: 1, .. })));
    }

    #[test]
    fn queue_capacity_forms() {
        assert_eq!(SimConfig::parse("queue_capacity=unbounded").unwrap().queue_cap(), None);
        assert_eq!(SimConfig::parse("queue_capacity=3").unwrap().queue_cap(), Some(3));
        let c = SimConfig::parse("link_bandwidth=4000").unwrap();
        assert_eq!(c.queue_cap(), Some(100));
    }

    #[test]
    fn text_round_trip() {
        let c = SimConfig::parse("seed=9\nstrategy=mte\neps_amp=0.1\nqueue_capacity=unbounded\nexceptions=false").unwrap();
        assert_eq!(SimConfig::parse(&c.to_text()).unwrap(), c);
    }
}

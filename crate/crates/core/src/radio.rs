//! First-order radio energy model.
//!
//! All energies are in microjoules. Transmitting `k` bits over `d` meters costs
//! `k * e_tx_elec + k * eps_amp * d^n`, receiving costs `k * e_rx_elec`, and an
//! idle mote drains `idle_power` per second.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Energy and timing constants of a mote radio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RadioParams {
    /// Transmitter circuitry, µJ/bit.
    pub e_tx_elec: f64,
    /// Receiver circuitry, µJ/bit.
    pub e_rx_elec: f64,
    /// Transmit amplifier, µJ/bit/m^n.
    pub eps_amp: f64,
    pub path_loss_exponent: f64,
    /// Idle drain, µJ/s.
    pub idle_power: f64,
    /// Seconds per round.
    pub round_period: f64,
    /// Bits per second between peers.
    pub link_bandwidth: f64,
    pub packet_bits: u64,
    /// Size of an exception message.
    pub ctrl_bits: u64,
    /// Starting battery per node, µJ.
    pub initial_energy: f64,
}

impl Default for RadioParams {
    /// Rene mote constants: 10 kbit/s links, one 50-byte packet every 10 s,
    /// 15390 J batteries.
    fn default() -> Self {
        Self {
            e_tx_elec: 2.51789,
            e_rx_elec: 2.02866,
            eps_amp: 1.8,
            path_loss_exponent: 2.0,
            idle_power: 1000.0,
            round_period: 10.0,
            link_bandwidth: 10_000.0,
            packet_bits: 400,
            ctrl_bits: 64,
            initial_energy: 1.539e10,
        }
    }
}

impl RadioParams {
    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("e_tx_elec", self.e_tx_elec),
            ("e_rx_elec", self.e_rx_elec),
            ("eps_amp", self.eps_amp),
            ("path_loss_exponent", self.path_loss_exponent),
            ("idle_power", self.idle_power),
            ("link_bandwidth", self.link_bandwidth),
            ("initial_energy", self.initial_energy),
        ];
        for (field, value) in non_negative {
            if !value.is_finite() || value < 0.0 {
                return Err(Error::config(field, format!("must be finite and >= 0, got {value}")));
            }
        }
        if !self.round_period.is_finite() || self.round_period <= 0.0 {
            return Err(Error::config(
                "round_period",
                format!("must be finite and > 0, got {}", self.round_period),
            ));
        }
        if self.packet_bits == 0 {
            return Err(Error::config("packet_bits", "must be > 0"));
        }
        Ok(())
    }

    /// Energy to transmit `bits` over `distance` meters.
    pub fn tx_energy(&self, bits: u64, distance: f64) -> Result<f64> {
        if distance.is_nan() || distance < 0.0 {
            return Err(Error::argument("distance", format!("must be >= 0, got {distance}")));
        }
        Ok(self.tx_cost(bits, distance))
    }

    pub fn rx_energy(&self, bits: u64) -> f64 {
        bits as f64 * self.e_rx_elec
    }

    pub fn idle_energy(&self, duration: f64) -> Result<f64> {
        if duration.is_nan() || duration < 0.0 {
            return Err(Error::argument("duration", format!("must be >= 0, got {duration}")));
        }
        Ok(self.idle_power * duration)
    }

    /// Whole data packets a link can carry in one round.
    pub fn max_packets_per_round(&self) -> u64 {
        (self.link_bandwidth * self.round_period / self.packet_bits as f64).floor() as u64
    }

    /// Unchecked transmit cost for distances already known to be valid.
    pub(crate) fn tx_cost(&self, bits: u64, distance: f64) -> f64 {
        let bits = bits as f64;
        let amplification = if self.path_loss_exponent == 2.0 {
            distance * distance
        } else {
            distance.powf(self.path_loss_exponent)
        };
        bits * self.e_tx_elec + bits * self.eps_amp * amplification
    }

    pub(crate) fn round_idle_cost(&self) -> f64 {
        self.idle_power * self.round_period
    }
}

//! Next-hop selection for the Direct, MTE and diffusion strategies, and the
//! receiver-side exception protocol that steers diffusion senders away from
//! poorer, drained or overloaded relays.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::topology::{CandidateList, Topology};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    Direct,
    Mte,
    Diffusion,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Direct, Strategy::Mte, Strategy::Diffusion];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Direct => "direct",
            Strategy::Mte => "mte",
            Strategy::Diffusion => "diffusion",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "direct" => Ok(Strategy::Direct),
            "mte" => Ok(Strategy::Mte),
            "diffusion" => Ok(Strategy::Diffusion),
            _ => Err(Error::UnknownStrategy(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum HopTarget {
    Base,
    Node(usize),
}

/// What a sender knows about one candidate relay.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborEntry {
    pub neighbor_id: usize,
    pub distance: f64,
    /// `None` until the neighbor has reported its energy.
    pub last_known_energy: Option<f64>,
    pub below_threshold: bool,
    /// Round in which the neighbor reported a full queue.
    pub queue_blocked_round: Option<u64>,
}

impl NeighborEntry {
    pub fn new(neighbor_id: usize, distance: f64) -> Self {
        Self {
            neighbor_id,
            distance,
            last_known_energy: None,
            below_threshold: false,
            queue_blocked_round: None,
        }
    }
}

/// Fresh, information-free entries for `node` in candidate order.
pub fn initial_entries(topo: &Topology, candidates: &CandidateList, node: usize) -> Vec<NeighborEntry> {
    candidates
        .of(node)
        .iter()
        .map(|&j| NeighborEntry::new(j, topo.distance_between(node, j)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExceptionKind {
    PowerLowerThanSender,
    BelowThreshold,
    QueueFull,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExceptionReason {
    pub kind: ExceptionKind,
    /// Receiver's energy when it refused the packet.
    pub reporter_energy: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum PacketKind {
    Data,
    Exception(ExceptionReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Packet {
    pub origin_id: usize,
    pub current_hop_id: usize,
    pub size_bits: u64,
    /// Sender's remaining energy after paying for this transmission.
    pub piggyback_energy: f64,
    pub kind: PacketKind,
}

impl Packet {
    pub fn data(origin_id: usize, current_hop_id: usize, size_bits: u64, piggyback_energy: f64) -> Self {
        Self { origin_id, current_hop_id, size_bits, piggyback_energy, kind: PacketKind::Data }
    }

    pub fn exception(reporter: usize, size_bits: u64, reason: ExceptionReason) -> Self {
        Self {
            origin_id: reporter,
            current_hop_id: reporter,
            size_bits,
            piggyback_energy: reason.reporter_energy,
            kind: PacketKind::Exception(reason),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Reception {
    Accept,
    Exception(ExceptionReason),
}

pub fn direct_next_hop(_node: usize) -> HopTarget {
    HopTarget::Base
}

/// Nearest alive candidate, else the base station.
pub fn mte_next_hop(node: usize, candidates: &CandidateList, alive: &[bool]) -> HopTarget {
    candidates
        .of(node)
        .iter()
        .copied()
        .find(|&j| alive[j])
        .map_or(HopTarget::Base, HopTarget::Node)
}

/// First candidate that is alive, not queue-blocked this round, not known to be
/// below threshold, and not known to be poorer than the sender.
pub fn diffusion_next_hop(
    entries: &[NeighborEntry],
    own_energy: f64,
    alive: &[bool],
    round: u64,
) -> HopTarget {
    diffusion_next_hop_excluding(entries, own_energy, alive, round, &[])
}

/// [`diffusion_next_hop`] that additionally skips relays which already refused
/// the packet being forwarded.
pub(crate) fn diffusion_next_hop_excluding(
    entries: &[NeighborEntry],
    own_energy: f64,
    alive: &[bool],
    round: u64,
    refused: &[usize],
) -> HopTarget {
    entries
        .iter()
        .find(|e| {
            alive[e.neighbor_id]
                && e.queue_blocked_round != Some(round)
                && !e.below_threshold
                && e.last_known_energy.is_none_or(|known| known > own_energy)
                && !refused.contains(&e.neighbor_id)
        })
        .map_or(HopTarget::Base, |e| HopTarget::Node(e.neighbor_id))
}

/// Relay-side admission check for a data packet from a peer. Conditions are
/// tried in order and the first that fires is reported.
pub fn on_receive(
    receiver_energy: f64,
    pkt: &Packet,
    threshold: f64,
    queue_len: u64,
    queue_cap: Option<u64>,
) -> Reception {
    let kind = if receiver_energy < pkt.piggyback_energy {
        Some(ExceptionKind::PowerLowerThanSender)
    } else if receiver_energy < threshold {
        Some(ExceptionKind::BelowThreshold)
    } else if queue_cap.is_some_and(|cap| queue_len >= cap) {
        Some(ExceptionKind::QueueFull)
    } else {
        None
    };
    match kind {
        Some(kind) => Reception::Exception(ExceptionReason { kind, reporter_energy: receiver_energy }),
        None => Reception::Accept,
    }
}

/// Folds an exception from neighbor `from` into the sender's table.
pub fn apply_exception(
    entries: &mut [NeighborEntry],
    from: usize,
    reason: ExceptionReason,
    round: u64,
    threshold: f64,
) -> Result<()> {
    let entry = entries
        .iter_mut()
        .find(|e| e.neighbor_id == from)
        .ok_or_else(|| Error::Protocol(format!("exception from node {from}, which is not a known neighbor")))?;
    entry.last_known_energy = Some(reason.reporter_energy);
    match reason.kind {
        ExceptionKind::PowerLowerThanSender => {}
        ExceptionKind::BelowThreshold => entry.below_threshold = true,
        ExceptionKind::QueueFull => entry.queue_blocked_round = Some(round),
    }
    if reason.kind != ExceptionKind::BelowThreshold && reason.reporter_energy >= threshold {
        entry.below_threshold = false;
    }
    Ok(())
}

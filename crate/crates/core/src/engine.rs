//! Round-driven data collection: every alive node originates one packet per
//! round, packets are forwarded hop by hop toward the base station, and every
//! joule spent is recorded in an energy ledger.

use serde::{Deserialize, Serialize};

use crate::config::SimConfig;
use crate::error::{Error, Result};
use crate::routing::{
    apply_exception, diffusion_next_hop_excluding, direct_next_hop, initial_entries, mte_next_hop,
    on_receive, HopTarget, NeighborEntry, Packet, Reception, Strategy,
};
use crate::topology::{build_candidates, place_nodes, CandidateList, Position, Topology};

#[derive(Debug, Clone)]
pub struct NodeState {
    pub id: usize,
    pub position: Position,
    pub energy: f64,
    pub alive: bool,
    /// Relayed packets accepted this round.
    pub queue_len: u64,
    pub entries: Vec<NeighborEntry>,
    pub death_round: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChargeKind {
    Idle,
    TxData,
    RxData,
    TxControl,
    RxControl,
}

/// One debit against a node's battery. `amount` is what was actually
/// withdrawn, which is less than the cost when the node could not pay.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Charge {
    pub node: usize,
    pub kind: ChargeKind,
    pub amount: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HopOutcome {
    /// The relay queued the packet.
    Accepted,
    /// The relay answered with an exception and the sender will retry.
    Refused,
    Delivered,
    Lost,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hop {
    pub origin: usize,
    pub from: usize,
    pub to: HopTarget,
    pub outcome: HopOutcome,
}

/// Totals by category, µJ.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub idle: f64,
    pub tx_data: f64,
    pub rx_data: f64,
    pub tx_control: f64,
    pub rx_control: f64,
}

impl EnergyLedger {
    fn record(&mut self, kind: ChargeKind, amount: f64) {
        match kind {
            ChargeKind::Idle => self.idle += amount,
            ChargeKind::TxData => self.tx_data += amount,
            ChargeKind::RxData => self.rx_data += amount,
            ChargeKind::TxControl => self.tx_control += amount,
            ChargeKind::RxControl => self.rx_control += amount,
        }
    }

    pub fn total(&self) -> f64 {
        self.idle + self.tx_data + self.rx_data + self.tx_control + self.rx_control
    }
}

/// What happened during one round.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RoundReport {
    pub round: u64,
    /// Nodes that originated a packet (alive after the idle charge).
    pub originated: u64,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
    /// Nodes that died this round, in order of death.
    pub deaths: Vec<usize>,
    pub alive_after: usize,
    /// Filled only when event recording is enabled.
    pub charges: Vec<Charge>,
    pub hops: Vec<Hop>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceSample {
    pub round: u64,
    pub node: usize,
    pub energy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub strategy: Strategy,
    pub seed: u64,
    pub nodes: usize,
    pub first_death_round: Option<u64>,
    pub last_death_round: Option<u64>,
    pub utility_pct: Option<f64>,
    pub rounds_run: u64,
    /// `max_rounds` was reached with nodes still alive.
    pub truncated: bool,
    /// Alive nodes at the end of round `i + 1`.
    pub alive_curve: Vec<u32>,
    pub energy_trace: Vec<TraceSample>,
    pub death_rounds: Vec<Option<u64>>,
    pub delivered: u64,
    pub lost: u64,
    pub exceptions: u64,
    pub data_bits_sent: u64,
    pub control_bits_sent: u64,
    pub ledger: EnergyLedger,
    pub initial_energy_total: f64,
    pub final_energies: Vec<f64>,
}

impl SimResult {
    /// Energy actually drained from batteries over the run.
    pub fn energy_drained(&self) -> f64 {
        self.initial_energy_total - self.final_energies.iter().sum::<f64>()
    }
}

/// Percentage of the network lifetime during which every node was alive,
/// rounded to two decimals.
pub fn utility_pct(first: u64, last: u64) -> Result<f64> {
    if last == 0 {
        return Err(Error::argument("last", "must be > 0"));
    }
    if first == 0 || first > last {
        return Err(Error::argument("first", format!("must satisfy 0 < first <= last, got {first} > {last}")));
    }
    let raw = 100.0 * first as f64 / last as f64;
    Ok((raw * 100.0).round() / 100.0)
}

/// A single simulation run in progress.
pub struct Simulation {
    config: SimConfig,
    topo: Topology,
    candidates: CandidateList,
    order: Vec<usize>,
    nodes: Vec<NodeState>,
    alive: Vec<bool>,
    alive_count: usize,
    round: u64,
    ledger: EnergyLedger,
    record_events: bool,
    inbox: Vec<Vec<Packet>>,
    refused: Vec<usize>,
    report: RoundReport,
    alive_curve: Vec<u32>,
    energy_trace: Vec<TraceSample>,
    delivered: u64,
    lost: u64,
    exceptions: u64,
    data_bits_sent: u64,
    control_bits_sent: u64,
}

impl Simulation {
    /// Places nodes from the configured seed.
    pub fn new(config: SimConfig) -> Result<Self> {
        config.validate()?;
        let topo = place_nodes(config.nodes, config.area_side, config.mean, config.stddev, config.seed)?;
        Self::with_topology(config, topo)
    }

    /// Runs on a given topology; `config.nodes` is overridden by its size.
    pub fn with_topology(mut config: SimConfig, topo: Topology) -> Result<Self> {
        config.nodes = topo.len();
        config.validate()?;
        let candidates = build_candidates(&topo);
        let n = topo.len();
        let nodes = (0..n)
            .map(|id| NodeState {
                id,
                position: topo.position(id),
                energy: config.radio.initial_energy,
                alive: config.radio.initial_energy > 0.0,
                queue_len: 0,
                entries: match config.strategy {
                    Strategy::Diffusion => initial_entries(&topo, &candidates, id),
                    _ => Vec::new(),
                },
                death_round: None,
            })
            .collect::<Vec<_>>();
        let alive: Vec<bool> = nodes.iter().map(|s| s.alive).collect();
        let alive_count = alive.iter().filter(|&&a| a).count();
        Ok(Self {
            order: topo.farthest_first(),
            config,
            topo,
            candidates,
            nodes,
            alive,
            alive_count,
            round: 0,
            ledger: EnergyLedger::default(),
            record_events: false,
            inbox: vec![Vec::new(); n],
            refused: Vec::new(),
            report: RoundReport::default(),
            alive_curve: Vec::new(),
            energy_trace: Vec::new(),
            delivered: 0,
            lost: 0,
            exceptions: 0,
            data_bits_sent: 0,
            control_bits_sent: 0,
        })
    }

    /// Keep per-event charge and hop logs in each [`RoundReport`].
    pub fn record_events(mut self, on: bool) -> Self {
        self.record_events = on;
        self
    }

    pub fn config(&self) -> &SimConfig {
        &self.config
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn candidates(&self) -> &CandidateList {
        &self.candidates
    }

    pub fn nodes(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn alive_count(&self) -> usize {
        self.alive_count
    }

    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn ledger(&self) -> &EnergyLedger {
        &self.ledger
    }

    /// Alive count after each completed round.
    pub fn alive_curve(&self) -> &[u32] {
        &self.alive_curve
    }

    pub fn delivered(&self) -> u64 {
        self.delivered
    }

    pub fn lost(&self) -> u64 {
        self.lost
    }

    pub fn exceptions(&self) -> u64 {
        self.exceptions
    }

    pub fn is_finished(&self) -> bool {
        self.alive_count == 0 || self.round >= self.config.max_rounds
    }

    /// Withdraws `cost` from `node`. Returns false when the node could not
    /// cover it or was left with nothing; either way it is dead and whatever
    /// it was doing fails.
    fn charge(&mut self, node: usize, kind: ChargeKind, cost: f64) -> bool {
        let state = &mut self.nodes[node];
        let (amount, paid) = if cost > state.energy { (state.energy, false) } else { (cost, true) };
        state.energy -= amount;
        if !paid {
            state.energy = 0.0;
        }
        self.ledger.record(kind, amount);
        if self.record_events {
            self.report.charges.push(Charge { node, kind, amount });
        }
        if state.energy <= 0.0 {
            state.energy = 0.0;
            self.kill(node);
        }
        paid && self.alive[node]
    }

    fn kill(&mut self, node: usize) {
        let state = &mut self.nodes[node];
        if !state.alive {
            return;
        }
        state.alive = false;
        state.death_round = Some(self.round);
        self.alive[node] = false;
        self.alive_count -= 1;
        self.report.deaths.push(node);
        // Anything waiting to be relayed by this node is gone.
        let stranded = self.inbox[node].len() as u64;
        self.inbox[node].clear();
        self.report.lost += stranded;
    }

    fn log_hop(&mut self, origin: usize, from: usize, to: HopTarget, outcome: HopOutcome) {
        if self.record_events {
            self.report.hops.push(Hop { origin, from, to, outcome });
        }
    }

    fn hop_distance(&self, from: usize, to: HopTarget) -> f64 {
        match to {
            HopTarget::Base => self.topo.dist_to_base(from),
            HopTarget::Node(j) => self.topo.distance_between(from, j),
        }
    }

    fn next_hop(&self, sender: usize) -> HopTarget {
        match self.config.strategy {
            Strategy::Direct => direct_next_hop(sender),
            Strategy::Mte => mte_next_hop(sender, &self.candidates, &self.alive),
            Strategy::Diffusion => {
                let s = &self.nodes[sender];
                diffusion_next_hop_excluding(&s.entries, s.energy, &self.alive, self.round, &self.refused)
            }
        }
    }

    /// Moves one packet a single hop forward from `sender`, retrying after
    /// exceptions until a relay or the base station takes it.
    fn forward(&mut self, sender: usize, origin: usize) {
        let radio = self.config.radio;
        let relay_checks = self.config.strategy == Strategy::Diffusion && self.config.exceptions;
        let threshold = self.config.threshold();
        let queue_cap = self.config.queue_cap();
        self.refused.clear();
        loop {
            let target = self.next_hop(sender);
            let dist = self.hop_distance(sender, target);
            self.data_bits_sent += radio.packet_bits;
            if !self.charge(sender, ChargeKind::TxData, radio.tx_cost(radio.packet_bits, dist)) {
                self.report.lost += 1;
                self.log_hop(origin, sender, target, HopOutcome::Lost);
                return;
            }
            let receiver = match target {
                HopTarget::Base => {
                    self.report.delivered += 1;
                    self.log_hop(origin, sender, target, HopOutcome::Delivered);
                    return;
                }
                HopTarget::Node(r) => r,
            };
            let pkt = Packet::data(origin, sender, radio.packet_bits, self.nodes[sender].energy);
            if !self.charge(receiver, ChargeKind::RxData, radio.rx_energy(radio.packet_bits)) {
                self.report.lost += 1;
                self.log_hop(origin, sender, target, HopOutcome::Lost);
                return;
            }
            let reception = if relay_checks {
                let r = &self.nodes[receiver];
                on_receive(r.energy, &pkt, threshold, r.queue_len, queue_cap)
            } else {
                Reception::Accept
            };
            let reason = match reception {
                Reception::Accept => {
                    self.nodes[receiver].queue_len += 1;
                    self.inbox[receiver].push(pkt);
                    self.log_hop(origin, sender, target, HopOutcome::Accepted);
                    return;
                }
                Reception::Exception(reason) => reason,
            };
            self.report.exceptions += 1;
            self.log_hop(origin, sender, target, HopOutcome::Refused);
            self.refused.push(receiver);
            self.control_bits_sent += radio.ctrl_bits;
            if !self.charge(receiver, ChargeKind::TxControl, radio.tx_cost(radio.ctrl_bits, dist)) {
                // The exception never fully left the relay; the sender only
                // learns that the relay is gone.
                continue;
            }
            if !self.charge(sender, ChargeKind::RxControl, radio.rx_energy(radio.ctrl_bits)) {
                self.report.lost += 1;
                return;
            }
            apply_exception(&mut self.nodes[sender].entries, receiver, reason, self.round, threshold)
                .expect("exceptions only come from listed candidates");
        }
    }

    /// Executes the next round and returns what happened in it.
    pub fn run_round(&mut self) -> RoundReport {
        self.round += 1;
        self.report = RoundReport { round: self.round, ..RoundReport::default() };
        let idle = self.config.radio.round_idle_cost();
        for id in 0..self.nodes.len() {
            if self.alive[id] {
                self.charge(id, ChargeKind::Idle, idle);
            }
        }
        self.report.originated = self.alive_count as u64;
        // Each node's own packet heads its queue so that a node dying before
        // its turn loses it along with anything it was asked to relay.
        let bits = self.config.radio.packet_bits;
        for id in 0..self.nodes.len() {
            if self.alive[id] {
                let energy = self.nodes[id].energy;
                self.inbox[id].push(Packet::data(id, id, bits, energy));
            }
        }

        for idx in 0..self.order.len() {
            let node = self.order[idx];
            if !self.alive[node] {
                continue;
            }
            let queued = std::mem::take(&mut self.inbox[node]);
            let mut pending = queued.iter().map(|p| p.origin_id);
            while let Some(origin) = pending.next() {
                if !self.alive[node] {
                    self.report.lost += 1 + pending.count() as u64;
                    break;
                }
                self.forward(node, origin);
            }
        }

        for s in &mut self.nodes {
            s.queue_len = 0;
        }
        let stride = self.config.trace_stride;
        if stride > 0 && self.round.is_multiple_of(stride) {
            // Nodes alive at the start of the round, including those that died in it.
            let round = self.round;
            let samples = self
                .nodes
                .iter()
                .filter(|s| s.alive || s.death_round == Some(round))
                .map(|s| TraceSample { round, node: s.id, energy: s.energy });
            self.energy_trace.extend(samples);
        }
        self.delivered += self.report.delivered;
        self.lost += self.report.lost;
        self.exceptions += self.report.exceptions;
        self.report.alive_after = self.alive_count;
        self.alive_curve.push(self.alive_count as u32);
        std::mem::take(&mut self.report)
    }

    /// Runs until every node is dead or `max_rounds` is reached.
    pub fn run(mut self) -> SimResult {
        while !self.is_finished() {
            self.run_round();
        }
        self.into_result()
    }

    /// Metrics and traces so far; lifetimes are `None` until the events happen.
    pub fn result(&self) -> SimResult {
        let n = self.nodes.len();
        let death_rounds: Vec<Option<u64>> = self.nodes.iter().map(|s| s.death_round).collect();
        let first_death_round = death_rounds.iter().flatten().copied().min();
        let last_death_round =
            if self.alive_count == 0 { death_rounds.iter().flatten().copied().max() } else { None };
        let utility = match (first_death_round, last_death_round) {
            (Some(f), Some(l)) => utility_pct(f, l).ok(),
            _ => None,
        };
        SimResult {
            strategy: self.config.strategy,
            seed: self.config.seed,
            nodes: n,
            first_death_round,
            last_death_round,
            utility_pct: utility,
            rounds_run: self.round,
            truncated: self.alive_count > 0,
            alive_curve: self.alive_curve.clone(),
            energy_trace: self.energy_trace.clone(),
            death_rounds,
            delivered: self.delivered,
            lost: self.lost,
            exceptions: self.exceptions,
            data_bits_sent: self.data_bits_sent,
            control_bits_sent: self.control_bits_sent,
            ledger: self.ledger,
            initial_energy_total: self.config.radio.initial_energy * n as f64,
            final_energies: self.nodes.iter().map(|s| s.energy).collect(),
        }
    }

    pub fn into_result(mut self) -> SimResult {
        let alive_curve = std::mem::take(&mut self.alive_curve);
        let energy_trace = std::mem::take(&mut self.energy_trace);
        SimResult { alive_curve, energy_trace, ..self.result() }
    }
}

pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    Ok(Simulation::new(config.clone())?.run())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_node(strategy: Strategy) -> Simulation {
        let topo = Topology::from_positions(100.0, vec![Position::new(3.0, 4.0)]).unwrap();
        let config = SimConfig { strategy, trace_stride: 0, ..SimConfig::default() };
        Simulation::with_topology(config, topo).unwrap()
    }

    #[test]
    fn utility_examples() {
        assert_eq!(utility_pct(3425, 4323).unwrap(), 79.23);
        assert_eq!(utility_pct(15, 843).unwrap(), 1.78);
        assert_eq!(utility_pct(77, 77).unwrap(), 100.0);
        assert!(matches!(utility_pct(1, 0), Err(Error::Argument { name: "last", .. })));
        assert!(utility_pct(0, 10).is_err());
        assert!(utility_pct(11, 10).is_err());
    }

    #[test]
    fn single_node_round_drain() {
        let mut sim = single_node(Strategy::Direct).record_events(true);
        let report = sim.run_round();
        let total: f64 = report.charges.iter().map(|c| c.amount).sum();
        // idle 10000 + 400 * 2.51789 + 400 * 1.8 * 25
        assert!((total - 29_007.156).abs() < 1e-6);
        assert_eq!(report.delivered, 1);
        assert_eq!(report.hops, vec![Hop { origin: 0, from: 0, to: HopTarget::Base, outcome: HopOutcome::Delivered }]);
    }

    #[test]
    fn single_node_lifetime() {
        // Repeated-subtraction oracle: idle then transmit each round until a
        // charge can no longer be covered.
        let (idle, tx) = (10_000.0_f64, 400.0 * 2.51789 + 400.0 * 1.8 * 25.0);
        let mut energy = 1.539e10_f64;
        let mut round = 0u64;
        loop {
            round += 1;
            if idle >= energy {
                break;
            }
            energy -= idle;
            if tx >= energy {
                break;
            }
            energy -= tx;
        }
        assert_eq!(round, 530_559);
        let result = single_node(Strategy::Direct).run();
        assert_eq!(result.first_death_round, Some(round));
        assert_eq!(result.last_death_round, Some(round));
        assert_eq!(result.utility_pct, Some(100.0));
        assert!(!result.truncated);
    }

    #[test]
    fn truncation_is_flagged() {
        let topo = Topology::from_positions(100.0, vec![Position::new(3.0, 4.0)]).unwrap();
        let config = SimConfig { max_rounds: 5, ..SimConfig::default() };
        let result = Simulation::with_topology(config, topo).unwrap().run();
        assert!(result.truncated);
        assert_eq!(result.rounds_run, 5);
        assert_eq!(result.first_death_round, None);
        assert_eq!(result.utility_pct, None);
        assert_eq!(result.energy_trace.len(), 5);
    }

    #[test]
    fn pauper_relay_loses_packet() {
        // Node 0 can pay its idle cost but not a reception.
        let topo = Topology::from_positions(
            100.0,
            vec![Position::new(10.0, 0.0), Position::new(20.0, 0.0)],
        )
        .unwrap();
        let config = SimConfig { strategy: Strategy::Mte, ..SimConfig::default() };
        let mut sim = Simulation::with_topology(config, topo).unwrap().record_events(true);
        sim.nodes[0].energy = 10_100.0;
        let report = sim.run_round();
        assert_eq!(report.deaths, vec![0]);
        // Node 1's packet dies with the relay, and node 0 never gets to send its own.
        assert_eq!(report.originated, 2);
        assert_eq!(report.lost, 2);
        assert_eq!(report.delivered, 0);
        assert_eq!(sim.nodes()[0].energy, 0.0);
        let drained: f64 = report.charges.iter().filter(|c| c.node == 0).map(|c| c.amount).sum();
        assert_eq!(drained, 10_100.0);
    }

    #[test]
    fn trace_stride_decimates() {
        let topo = Topology::from_positions(100.0, vec![Position::new(3.0, 4.0), Position::new(1.0, 1.0)]).unwrap();
        let config = SimConfig { trace_stride: 3, max_rounds: 10, ..SimConfig::default() };
        let result = Simulation::with_topology(config, topo).unwrap().run();
        let rounds: Vec<u64> = result.energy_trace.iter().map(|s| s.round).collect();
        assert_eq!(rounds, vec![3, 3, 6, 6, 9, 9]);
        assert!(result.energy_trace[0].energy < 1.539e10);
    }
}

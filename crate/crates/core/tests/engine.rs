use proptest::prelude::*;

use wsn_sim::engine::{ChargeKind, HopOutcome};
use wsn_sim::topology::place_nodes;
use wsn_sim::{run_simulation, HopTarget, QueueCapacity, RadioParams, SimConfig, Simulation, Strategy};

fn strategy() -> impl proptest::strategy::Strategy<Value = Strategy> {
    prop_oneof![Just(Strategy::Direct), Just(Strategy::Mte), Just(Strategy::Diffusion)]
}

/// Small batteries so runs reach extinction in a few hundred rounds.
fn small_config(strategy: Strategy, seed: u64, nodes: usize) -> SimConfig {
    SimConfig {
        strategy,
        seed,
        nodes,
        radio: RadioParams { initial_energy: 5e7, ..RadioParams::default() },
        threshold_fraction: 0.05,
        trace_stride: 1,
        ..SimConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn energy_is_conserved(strategy in strategy(), seed in 0u64..10_000, nodes in 1usize..25) {
        let r = run_simulation(&small_config(strategy, seed, nodes)).unwrap();
        prop_assert!(!r.truncated);
        let drained = r.energy_drained();
        prop_assert!((r.ledger.total() - drained).abs() <= 1e-9 * drained);
        prop_assert!(r.final_energies.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn round_accounting(strategy in strategy(), seed in 0u64..10_000, nodes in 1usize..25) {
        let mut sim = Simulation::new(small_config(strategy, seed, nodes)).unwrap().record_events(true);
        let mut previous_alive = nodes;
        while !sim.is_finished() {
            let report = sim.run_round();
            prop_assert_eq!(report.delivered + report.lost, report.originated);
            prop_assert!(report.alive_after <= previous_alive);
            previous_alive = report.alive_after;
            for c in &report.charges {
                prop_assert!(c.amount >= 0.0);
            }
            // No control traffic besides exceptions.
            let refusals = report.hops.iter().filter(|h| h.outcome == HopOutcome::Refused).count() as u64;
            prop_assert_eq!(refusals, report.exceptions);
            let ctrl_tx = report.charges.iter().filter(|c| c.kind == ChargeKind::TxControl).count() as u64;
            prop_assert_eq!(ctrl_tx, report.exceptions);
            if strategy != Strategy::Diffusion {
                prop_assert_eq!(report.exceptions, 0);
            }
            for s in sim.nodes() {
                prop_assert!(s.energy >= 0.0);
                prop_assert_eq!(s.alive, s.energy > 0.0);
            }
        }
    }

    #[test]
    fn hops_make_progress(strategy in strategy(), seed in 0u64..10_000, nodes in 1usize..25) {
        let mut sim = Simulation::new(small_config(strategy, seed, nodes)).unwrap().record_events(true);
        while !sim.is_finished() {
            let report = sim.run_round();
            for hop in &report.hops {
                if let HopTarget::Node(to) = hop.to {
                    prop_assert!(sim.topology().dist_to_base(to) < sim.topology().dist_to_base(hop.from));
                }
            }
        }
    }

    #[test]
    fn direct_deaths_ordered_by_distance(seed in 0u64..10_000, nodes in 2usize..40) {
        let config = SimConfig { strategy: Strategy::Direct, ..small_config(Strategy::Direct, seed, nodes) };
        let r = run_simulation(&config).unwrap();
        let topo = place_nodes(nodes, 100.0, 50.0, 50.0, seed).unwrap();
        for i in 0..nodes {
            for j in 0..nodes {
                if topo.dist_to_base(i) > topo.dist_to_base(j) {
                    prop_assert!(r.death_rounds[i] <= r.death_rounds[j]);
                }
            }
        }
    }

    #[test]
    fn same_seed_same_result(strategy in strategy(), seed in 0u64..10_000) {
        let config = small_config(strategy, seed, 12);
        prop_assert_eq!(run_simulation(&config).unwrap(), run_simulation(&config).unwrap());
    }
}

#[test]
fn piggybacking_adds_no_data_bits() {
    for seed in 0..10 {
        let base = SimConfig {
            seed,
            threshold_fraction: 0.0,
            queue_capacity: QueueCapacity::Unbounded,
            exceptions: false,
            max_rounds: 200,
            trace_stride: 0,
            ..SimConfig::default()
        };
        let mte = run_simulation(&SimConfig { strategy: Strategy::Mte, ..base.clone() }).unwrap();
        let diffusion = run_simulation(&SimConfig { strategy: Strategy::Diffusion, ..base }).unwrap();
        assert_eq!(diffusion.data_bits_sent, mte.data_bits_sent);
        assert_eq!(diffusion.control_bits_sent, 0);
        assert_eq!(diffusion.ledger, mte.ledger);
    }
}

#[test]
fn control_bits_match_exception_count() {
    let r = run_simulation(&SimConfig { nodes: 30, seed: 5, trace_stride: 0, ..SimConfig::default() }).unwrap();
    assert!(r.exceptions > 0);
    assert_eq!(r.control_bits_sent, r.exceptions * 64);
}

#[test]
fn full_queues_push_traffic_elsewhere() {
    // With room for a single relayed packet per round, relays near the base
    // refuse and senders fall back further down their lists.
    let config = SimConfig {
        nodes: 20,
        seed: 3,
        queue_capacity: QueueCapacity::Limited(1),
        max_rounds: 1,
        ..SimConfig::default()
    };
    let mut sim = Simulation::new(config).unwrap().record_events(true);
    let report = sim.run_round();
    assert!(report.exceptions > 0);
    assert_eq!(report.delivered, 20);
    for s in sim.nodes() {
        assert!(s.queue_len == 0, "queues reset at round end");
    }
}

#[test]
fn alive_curve_is_non_increasing() {
    for strategy in Strategy::ALL {
        let r = run_simulation(&small_config(strategy, 9, 30)).unwrap();
        assert!(r.alive_curve.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(r.alive_curve.last(), Some(&0));
        assert!(r.first_death_round <= r.last_death_round);
        let u = r.utility_pct.unwrap();
        assert!(u > 0.0 && u <= 100.0);
    }
}

use fleetassign_distsim::{
    auction_nodes, cbaa_nodes, contested_tasks, greedy_sequential, run_cbaa, run_distributed_auction, CbaaNode,
    NetworkTopology, ProtocolNode, Simulator,
};
use fleetassign_model::generate::{random_instance, InstanceParams};
use fleetassign_model::{objective_value, ratio, AssignmentInstance, ObjectiveKind, Rational, Sense};
use fleetassign_oracle::brute_force;
use proptest::prelude::*;

fn instance(n: usize, sense: Sense, seed: u64) -> AssignmentInstance {
    let params = InstanceParams {
        sense,
        ..InstanceParams::square(n, 0, 25)
    };
    random_instance(&params, seed).unwrap()
}

fn topologies(n: usize, seed: u64) -> Vec<(&'static str, NetworkTopology)> {
    vec![
        ("complete", NetworkTopology::complete(n)),
        ("ring", NetworkTopology::ring(n)),
        ("line", NetworkTopology::line(n)),
        ("er", NetworkTopology::erdos_renyi(n, 0.3, seed).unwrap()),
    ]
}

fn optimum(inst: &AssignmentInstance) -> Rational {
    brute_force(inst, ObjectiveKind::Sum, None).unwrap().best_value
}

#[test]
fn distributed_auction_is_exact_below_one_over_n() {
    for n in 3..=6 {
        for seed in 0..25 {
            let sense = if seed % 2 == 0 {
                Sense::MinimizeCost
            } else {
                Sense::MaximizeProfit
            };
            let inst = instance(n, sense, 1000 * n as u64 + seed);
            let best = optimum(&inst);
            for (name, topo) in topologies(n, seed).into_iter().take(3) {
                let run = run_distributed_auction(&inst, &topo, ratio(1, n as i64 + 1)).unwrap();
                assert_eq!(run.value, best, "n {n} seed {seed} {name}");
                assert!(run.matching.is_perfect());
            }
        }
    }
}

#[test]
fn final_prices_certify_epsilon_complementary_slackness() {
    for seed in 0..40 {
        let inst = instance(5, Sense::MinimizeCost, seed);
        let eps = ratio(3, 2);
        let run = run_distributed_auction(&inst, &NetworkTopology::ring(5), eps).unwrap();
        for &(i, j) in run.matching.pairs() {
            let own = inst.weight(i, j) + run.prices[j];
            let best = (0..5).map(|k| inst.weight(i, k) + run.prices[k]).min().unwrap();
            assert!(own <= best + eps, "seed {seed} agent {i}");
        }
        let gap = run.value - optimum(&inst);
        assert!(gap <= Rational::from_integer(5) * eps);
    }
}

#[test]
fn cbaa_matches_greedy_and_halves_the_optimum() {
    for n in 3..=6 {
        for seed in 0..50 {
            let inst = instance(n, Sense::MaximizeProfit, 7000 + 100 * n as u64 + seed);
            let greedy = greedy_sequential(&inst).unwrap();
            let greedy_total = objective_value(&inst, &greedy, ObjectiveKind::Sum).unwrap();
            let best = optimum(&inst);
            for (name, topo) in topologies(n, seed) {
                let run = run_cbaa(&inst, &topo, true).unwrap();
                let last = run.logs.last().unwrap();
                assert_eq!(last.conflicts_open, 0, "{name}");
                assert_eq!(run.value, greedy_total, "n {n} seed {seed} {name}");
                assert!(
                    run.value * Rational::from_integer(2) >= best,
                    "n {n} seed {seed} {name}"
                );
            }
        }
    }
}

/// Feeds each node its recorded inboxes from scratch and compares the state
/// digests with the live run.
fn replays<N: ProtocolNode + Clone>(topo: &NetworkTopology, initial: Vec<N>, rounds: usize) {
    let mut sim = Simulator::new(topo, initial.clone()).recording();
    let run = sim.run(topo.diameter().unwrap_or(1), rounds);
    let inboxes = sim.inboxes().unwrap();
    for (i, start) in initial.into_iter().enumerate() {
        let mut node = start;
        for (r, round) in inboxes.iter().enumerate() {
            assert!(round[i].iter().all(|(sender, _)| topo.is_adjacent(*sender, i)));
            node.step(&round[i]);
            assert_eq!(node.digest(), run.logs[r].digests[i], "node {i} round {}", r + 1);
        }
    }
}

#[test]
fn state_depends_only_on_received_messages() {
    for seed in 0..10 {
        let inst = instance(6, Sense::MaximizeProfit, seed);
        let lossless = NetworkTopology::ring(6);
        let lossy = NetworkTopology::erdos_renyi(6, 0.4, seed)
            .unwrap()
            .with_loss(ratio(1, 3))
            .unwrap();
        for topo in [&lossless, &lossy] {
            replays(topo, cbaa_nodes(&inst), 100);
            replays(topo, auction_nodes(&inst, ratio(1, 7)).unwrap(), 5000);
        }
    }
}

#[test]
fn local_tables_never_decrease() {
    for seed in 0..15 {
        let inst = instance(5, Sense::MaximizeProfit, seed);
        let topo = NetworkTopology::line(5).with_loss(ratio(1, 5)).unwrap().with_seed(seed);

        let mut sim = Simulator::new(&topo, auction_nodes(&inst, ratio(1, 6)).unwrap());
        let mut before: Vec<Vec<i64>> = sim
            .nodes()
            .iter()
            .map(|n| n.table().iter().map(|e| e.0).collect())
            .collect();
        for _ in 0..200 {
            sim.round();
            let after: Vec<Vec<i64>> = sim
                .nodes()
                .iter()
                .map(|n| n.table().iter().map(|e| e.0).collect())
                .collect();
            for (b, a) in before.iter().flatten().zip(after.iter().flatten()) {
                assert!(a >= b);
            }
            before = after;
        }

        let mut sim = Simulator::new(&topo, cbaa_nodes(&inst));
        let bids = |nodes: &[CbaaNode]| -> Vec<Rational> { nodes.iter().flat_map(|n| n.winning_bids()).collect() };
        let mut before = bids(sim.nodes());
        for _ in 0..50 {
            sim.round();
            let after = bids(sim.nodes());
            assert!(before.iter().zip(&after).all(|(b, a)| a >= b));
            assert!(after.iter().all(|y| *y >= Rational::from_integer(0)));
            before = after;
        }
    }
}

#[test]
fn selected_bid_is_own_score() {
    let inst = instance(6, Sense::MaximizeProfit, 99);
    let topo = NetworkTopology::ring(6);
    let mut sim = Simulator::new(&topo, cbaa_nodes(&inst));
    for _ in 0..20 {
        sim.round();
        for (i, node) in sim.nodes().iter().enumerate() {
            if let Some(j) = node.selection() {
                let y: Vec<Rational> = node.winning_bids().collect();
                assert_eq!(y[j], inst.weight(i, j));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn terminating_runs_are_conflict_free(n in 1usize..7, seed in 0u64..10_000, p in 0.0f64..1.0) {
        let topo = NetworkTopology::erdos_renyi(n, p, seed).unwrap();
        let inst = instance(n, Sense::MaximizeProfit, seed);
        let cbaa = run_cbaa(&inst, &topo, true).unwrap();
        prop_assert_eq!(contested_tasks(cbaa.matching.task_of_agent()), 0);
        let auction = run_distributed_auction(&inst, &topo, ratio(1, n as i64 + 1)).unwrap();
        prop_assert!(auction.matching.is_perfect());
        prop_assert_eq!(auction.value, optimum(&inst));
    }
}

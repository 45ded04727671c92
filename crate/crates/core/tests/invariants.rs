use fleetassign_core::*;
use fleetassign_model::{int, objective_value, AssignmentInstance, ObjectiveKind, Rational, Sense};
use fleetassign_oracle::brute_force;
use proptest::prelude::*;

fn square(max_n: usize, lo: i64, hi: i64) -> impl Strategy<Value = AssignmentInstance> {
    (1..=max_n).prop_flat_map(move |n| {
        prop::collection::vec(lo..=hi, n * n).prop_map(move |flat| {
            let rows: Vec<Vec<i64>> = flat.chunks(n).map(<[i64]>::to_vec).collect();
            AssignmentInstance::from_integers(&rows, Sense::MinimizeCost).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn hungarian_strong_duality(inst in square(8, -50, 50)) {
        let sol = solve_hungarian(&inst).unwrap();
        prop_assert_eq!(sol.duals.dual_objective(), sol.value);
        prop_assert!(sol.duals.check_feasible(&inst).is_ok());
        prop_assert!(sol.duals.check_complementary_slackness(&inst, &sol.matching).is_ok());
    }

    #[test]
    fn auction_prices_rise_by_epsilon(inst in square(6, 0, 30), denom in 1i64..10) {
        let epsilon = Rational::new(1, denom);
        let config = AuctionConfig { schedule: vec![epsilon], record_prices: true };
        let sol = solve_auction_with(&inst, &config).unwrap();
        let history = sol.trace.price_history.unwrap();
        let mut previous = vec![int(0); inst.n_tasks()];
        for prices in &history {
            for (before, after) in previous.iter().zip(prices) {
                prop_assert!(after == before || *after >= before + epsilon);
            }
            previous = prices.clone();
        }
        prop_assert!(sol.duals.check_complementary_slackness(&inst, &sol.matching).is_ok());
    }

    #[test]
    fn auction_within_n_epsilon(inst in square(6, 0, 30), eps in 1i64..20) {
        let best = brute_force(&inst, ObjectiveKind::Sum, None).unwrap().best_value;
        let sol = solve_auction(&inst, int(eps)).unwrap();
        prop_assert!(sol.value - best <= int(eps * inst.n_agents() as i64));
    }

    #[test]
    fn bottleneck_monotone_under_lowering(inst in square(6, 0, 30), pick in 0usize..36, drop in 1i64..30) {
        let n = inst.n_agents();
        let (a, t) = (pick / 6 % n, pick % 6 % n);
        let lowered = inst.map_weights(|i, j, w| if (i, j) == (a, t) { w - int(drop) } else { w });
        let before = solve_bottleneck(&inst).unwrap().threshold;
        let after = solve_bottleneck(&lowered).unwrap().threshold;
        prop_assert!(after <= before);
    }

    #[test]
    fn fair_band_is_tight(inst in square(5, 0, 12)) {
        let sol = solve_fair_matching(&inst).unwrap();
        prop_assert_eq!(sol.upper - sol.lower, sol.spread);
        let matched = objective_value(&inst, &sol.matching, ObjectiveKind::Spread).unwrap();
        prop_assert_eq!(matched, sol.spread);
        let best = brute_force(&inst, ObjectiveKind::Spread, None).unwrap().best_value;
        prop_assert_eq!(sol.spread, best);
    }

    #[test]
    fn k_sum_extremes(inst in square(6, 0, 40)) {
        let n = inst.n_agents();
        prop_assert_eq!(solve_k_sum(&inst, 1).unwrap().value, solve_bottleneck(&inst).unwrap().threshold);
        prop_assert_eq!(solve_k_sum(&inst, n).unwrap().value, solve_hungarian(&inst).unwrap().value);
    }

    #[test]
    fn hopcroft_karp_size_matches_oracle(edges in prop::collection::vec((0usize..6, 0usize..6), 0..20)) {
        let m = max_cardinality_matching(6, 6, &edges);
        for &(i, j) in m.pairs() {
            prop_assert!(edges.contains(&(i, j)));
        }
        // profit 1 on edges, 0 elsewhere: the best partial matching size
        let rows: Vec<Vec<i64>> = (0..6).map(|i| (0..6).map(|j| i64::from(edges.contains(&(i, j)))).collect()).collect();
        let inst = AssignmentInstance::from_integers(&rows, Sense::MaximizeProfit).unwrap();
        let best = brute_force(&inst, ObjectiveKind::Sum, None).unwrap().best_value;
        prop_assert_eq!(int(m.len() as i64), best);
    }
}

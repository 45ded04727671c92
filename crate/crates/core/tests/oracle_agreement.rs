use fleetassign_core::*;
use fleetassign_model::generate::{
    random_demand, random_instance, random_qualification, random_resources, InstanceParams,
};
use fleetassign_model::{
    int, objective_value, AssignmentInstance, Matching, ObjectiveKind, Rational, SemiAssignmentDemand, Sense,
};
use fleetassign_oracle::{brute_force, Extras};

fn instance(n: usize, seed: u64) -> AssignmentInstance {
    random_instance(&InstanceParams::square(n, 0, 20), seed).unwrap()
}

fn oracle(inst: &AssignmentInstance, kind: ObjectiveKind) -> Rational {
    brute_force(inst, kind, None).unwrap().best_value
}

fn value(inst: &AssignmentInstance, m: &Matching, kind: ObjectiveKind) -> Rational {
    objective_value(inst, m, kind).unwrap()
}

#[test]
fn hungarian_7x7() {
    for seed in 0..200 {
        let inst = instance(7, seed);
        let sol = solve_hungarian(&inst).unwrap();
        assert_eq!(sol.value, oracle(&inst, ObjectiveKind::Sum), "seed {seed}");
        assert_eq!(sol.duality_gap(&inst), int(0));
        sol.duals.check_feasible(&inst).unwrap();
        sol.duals.check_complementary_slackness(&inst, &sol.matching).unwrap();
    }
}

#[test]
fn hungarian_profit_and_forbidden() {
    for seed in 0..100 {
        let params = InstanceParams {
            sense: Sense::MaximizeProfit,
            ..InstanceParams::square(6, -10, 10)
        };
        let forbidden = [(0, 0), (1, 2), (3, 3), (5, 1)];
        let inst = random_instance(&params, seed)
            .unwrap()
            .with_forbidden(forbidden)
            .unwrap();
        let sol = solve_hungarian(&inst).unwrap();
        assert_eq!(sol.value, oracle(&inst, ObjectiveKind::Sum), "seed {seed}");
        assert!(sol.matching.pairs().iter().all(|p| !forbidden.contains(p)));
    }
}

#[test]
fn auction_6x6_exact_and_bounded() {
    for seed in 0..100 {
        let inst = instance(6, seed);
        let best = oracle(&inst, ObjectiveKind::Sum);
        let exact = solve_auction(&inst, Rational::new(1, 7)).unwrap();
        assert_eq!(exact.value, best, "seed {seed}");
        let coarse = solve_auction(&inst, int(10)).unwrap();
        assert!(coarse.value - best <= int(60), "seed {seed}");
        let scaled = solve_auction_scaled(&inst).unwrap();
        assert_eq!(scaled.value, best, "seed {seed}");
    }
}

#[test]
fn auction_quarter_epsilon_4x4_matches_hungarian() {
    for seed in 0..100 {
        let inst = instance(4, seed);
        let sol = solve_auction(&inst, Rational::new(1, 5)).unwrap();
        assert_eq!(sol.value, solve_hungarian(&inst).unwrap().value);
        sol.duals.check_complementary_slackness(&inst, &sol.matching).unwrap();
    }
}

#[test]
fn naive_auction_on_ties() {
    let ones = AssignmentInstance::from_integers(&[[1, 1, 1], [1, 1, 1], [1, 1, 1]], Sense::MinimizeCost).unwrap();
    assert!(matches!(
        detect_naive_auction_cycle(&ones, 50).unwrap(),
        NaiveAuctionOutcome::CycleDetected { .. }
    ));
    let inst = AssignmentInstance::from_integers(&[[1, 2], [4, 3]], Sense::MinimizeCost).unwrap();
    match detect_naive_auction_cycle(&inst, 50).unwrap() {
        NaiveAuctionOutcome::Converged { matching, .. } => {
            assert_eq!(value(&inst, &matching, ObjectiveKind::Sum), int(4))
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn bottleneck_6x6() {
    for seed in 0..200 {
        let inst = instance(6, seed);
        let r = solve_bottleneck(&inst).unwrap();
        assert_eq!(r.threshold, oracle(&inst, ObjectiveKind::Bottleneck), "seed {seed}");
        assert_eq!(value(&inst, &r.matching, ObjectiveKind::Bottleneck), r.threshold);
    }
}

#[test]
fn fair_6x6() {
    for seed in 0..200 {
        let inst = instance(6, seed);
        let r = solve_fair_matching(&inst).unwrap();
        assert_eq!(r.spread, oracle(&inst, ObjectiveKind::Spread), "seed {seed}");
        assert_eq!(value(&inst, &r.matching, ObjectiveKind::Spread), r.spread);
    }
}

#[test]
fn min_deviation_5x5() {
    for seed in 0..200 {
        let inst = instance(5, seed);
        let r = solve_min_deviation(&inst).unwrap();
        assert_eq!(r.deviation, oracle(&inst, ObjectiveKind::MinDeviation), "seed {seed}");
        assert_eq!(value(&inst, &r.matching, ObjectiveKind::MinDeviation), r.deviation);
    }
}

#[test]
fn k_sum_5x5() {
    for seed in 0..200 {
        let inst = instance(5, seed);
        for k in [2, 3] {
            let r = solve_k_sum(&inst, k).unwrap();
            let best = oracle(&inst, ObjectiveKind::KSum(k));
            assert_eq!(r.value, best, "seed {seed} k {k}");
            assert!(r.sweep.iter().all(|(_, bound)| *bound >= best));
            assert!(r.sweep.iter().any(|(_, bound)| *bound == best));
        }
    }
}

#[test]
fn semi_assignment_6x3() {
    for seed in 0..100 {
        let params = InstanceParams {
            n_agents: 6,
            n_tasks: 3,
            ..InstanceParams::square(6, 0, 20)
        };
        let inst = random_instance(&params, seed).unwrap();
        let demand = random_demand(6, 3, seed).unwrap();
        let sol = solve_semi_assignment(&inst, &SemiAssignmentDemand::new(demand.clone()).unwrap()).unwrap();
        let best = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Demand(demand.clone())))
            .unwrap()
            .best_value;
        assert_eq!(sol.value, best, "seed {seed}");
        for (j, &d) in demand.iter().enumerate() {
            assert_eq!(sol.category_of_agent.iter().filter(|&&c| c == j).count(), d);
        }
    }
}

#[test]
fn semi_assignment_unit_demand_is_lap() {
    for seed in 0..50 {
        let inst = instance(5, seed);
        let sol = solve_semi_assignment(&inst, &SemiAssignmentDemand::new(vec![1; 5]).unwrap()).unwrap();
        assert_eq!(sol.value, solve_hungarian(&inst).unwrap().value);
    }
}

#[test]
fn apraq_5x5() {
    for seed in 0..200 {
        let params = InstanceParams {
            sense: Sense::MaximizeProfit,
            ..InstanceParams::square(5, -5, 20)
        };
        let inst = random_instance(&params, seed)
            .unwrap()
            .with_qualification(random_qualification(5, 5, 0.5, seed + 1000))
            .unwrap();
        let sol = solve_apraq(&inst).unwrap();
        let best = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Qualification))
            .unwrap()
            .best_value;
        assert_eq!(sol.value, best, "seed {seed}");
        assert!(sol.matching.pairs().iter().all(|&(i, j)| inst.is_qualified(i, j)));
    }
}

#[test]
fn side_constraints_5x5() {
    let mut feasible = 0;
    for seed in 0..100 {
        let inst = instance(5, seed);
        let set = random_resources(5, 5, 2, 10, seed + 500);
        let expected = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Constraints(set.clone())));
        match solve_with_side_constraints(&inst, &set) {
            Ok(sol) => {
                feasible += 1;
                assert_eq!(sol.value, expected.unwrap().best_value, "seed {seed}");
                assert!(set.is_satisfied_by(&sol.matching));
            }
            Err(SolveError::Infeasible(_)) => assert!(expected.is_err(), "seed {seed}"),
            Err(e) => panic!("seed {seed}: {e}"),
        }
    }
    assert!(feasible > 50);
}

#[test]
fn side_constraint_bound_is_sound() {
    for seed in 0..30 {
        let inst = instance(5, seed);
        let set = random_resources(5, 5, 2, 10, seed + 900);
        for first in 0..5 {
            for second in (0..5).filter(|&j| j != first) {
                let fixed = [(0, first), (1, second)];
                let bound = side_constraint_bound(&inst, &fixed).unwrap().unwrap();
                let agents: Vec<usize> = (2..5).collect();
                let tasks: Vec<usize> = (0..5).filter(|&j| j != first && j != second).collect();
                if let Some(best) = best_completion(&inst, &set, &fixed, &agents, &tasks) {
                    assert!(bound <= best, "seed {seed}");
                }
            }
        }
    }
}

/// Best budget-respecting completion of `fixed`, by enumeration.
fn best_completion(
    inst: &AssignmentInstance,
    set: &fleetassign_model::SideConstraintSet,
    fixed: &[(usize, usize)],
    agents: &[usize],
    tasks: &[usize],
) -> Option<Rational> {
    let mut best: Option<Rational> = None;
    permute(&mut (0..tasks.len()).collect::<Vec<_>>(), 0, &mut |perm| {
        let mut pairs = fixed.to_vec();
        pairs.extend(perm.iter().enumerate().map(|(a, &t)| (agents[a], tasks[t])));
        let m = Matching::new(inst.n_agents(), inst.n_tasks(), pairs).unwrap();
        if set.is_satisfied_by(&m) {
            let v = value(inst, &m, ObjectiveKind::Sum);
            if best.is_none_or(|b| v < b) {
                best = Some(v);
            }
        }
    });
    best
}

fn permute(items: &mut Vec<usize>, at: usize, visit: &mut impl FnMut(&[usize])) {
    if at == items.len() {
        visit(items);
        return;
    }
    for i in at..items.len() {
        items.swap(at, i);
        permute(items, at + 1, visit);
        items.swap(at, i);
    }
}

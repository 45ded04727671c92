//! Forward auction for the cost-form LAP.
//!
//! Rounds are Jacobi style: every unassigned agent bids in the same round.
//! Agent `i` bids for `j_i = argmin_j (c_ij + p_j)` and raises its price by
//! `gamma_i + epsilon`, where `gamma_i` is the gap to its second best task.
//! Each task goes to its highest bidder, ties to the lowest agent index.

use std::collections::HashSet;

use fleetassign_model::{objective_value, AssignmentInstance, DualState, Matching, ObjectiveKind, Rational};
use num_traits::{One, Zero};

use crate::bipartite::BipartiteGraph;
use crate::error::{SolveError, SolveResult};
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AuctionTrace {
    pub rounds: u64,
    pub final_epsilon: Rational,
    /// Prices after every round, when requested.
    pub price_history: Option<Vec<Vec<Rational>>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionSolution {
    pub matching: Matching,
    /// `v = -p`, `u_i = min_j (c_ij + p_j)`, with the final epsilon.
    pub duals: DualState,
    pub trace: AuctionTrace,
    pub value: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuctionConfig {
    /// Epsilon per phase; prices carry over between phases.
    pub schedule: Vec<Rational>,
    pub record_prices: bool,
}

impl AuctionConfig {
    pub fn fixed(epsilon: Rational) -> Self {
        Self {
            schedule: vec![epsilon],
            record_prices: false,
        }
    }
}

/// Decreasing epsilon sequence for scaled auctions: starts at
/// `max(1, C / 2)`, divides by 4, and stops at the first value below `1 / n`.
/// A single agent needs one phase, so `n = 1` yields `[1/2]`.
pub fn epsilon_schedule(n: usize, max_abs_weight: Rational) -> Vec<Rational> {
    let n = n.max(1);
    if n == 1 {
        return vec![Rational::new(1, 2)];
    }
    let target = Rational::new(1, n as i64);
    let half = max_abs_weight / Rational::from_integer(2);
    let mut epsilon = if half > Rational::one() { half } else { Rational::one() };
    let mut out = vec![epsilon];
    while epsilon >= target {
        epsilon /= Rational::from_integer(4);
        out.push(epsilon);
    }
    out
}

/// Single-epsilon auction with prices starting at zero.
pub fn solve_auction(instance: &AssignmentInstance, epsilon: Rational) -> SolveResult<AuctionSolution> {
    solve_auction_with(instance, &AuctionConfig::fixed(epsilon))
}

/// Auction driven by [`epsilon_schedule`]; exact for integer weights.
pub fn solve_auction_scaled(instance: &AssignmentInstance) -> SolveResult<AuctionSolution> {
    let costs = instance.to_min_cost().instance;
    let config = AuctionConfig {
        schedule: epsilon_schedule(instance.n_agents(), costs.max_abs_weight()),
        record_prices: false,
    };
    solve_auction_with(instance, &config)
}

pub fn solve_auction_with(instance: &AssignmentInstance, config: &AuctionConfig) -> SolveResult<AuctionSolution> {
    if !instance.is_square() {
        return Err(SolveError::NotSquare {
            agents: instance.n_agents(),
            tasks: instance.n_tasks(),
        });
    }
    let Some(&final_epsilon) = config.schedule.last() else {
        return Err(SolveError::InvalidEpsilon(Rational::zero()));
    };
    if let Some(bad) = config.schedule.iter().find(|e| **e <= Rational::zero()) {
        return Err(SolveError::InvalidEpsilon(*bad));
    }
    let cost_form = instance.to_min_cost().instance;
    let costs = IntCosts::from_instance(&cost_form, &config.schedule)?;
    let n = costs.rows;
    if !BipartiteGraph::from_predicate(n, n, |i, j| costs.is_allowed(i, j)).has_perfect_matching() {
        return Err(SolveError::Infeasible("no perfect matching over allowed pairs".into()));
    }

    let mut market = Market::new(&costs);
    let mut history = config.record_prices.then(Vec::new);
    let mut rounds = 0;
    for epsilon in &config.schedule {
        let step = costs.to_scaled(epsilon)?;
        market.reset_assignment();
        rounds += market.run(step, &mut |prices| {
            if let Some(h) = history.as_mut() {
                h.push(prices.iter().map(|&p| costs.to_rational(p)).collect());
            }
        })?;
    }

    let task_of_agent: Vec<usize> = market
        .task_of_agent
        .iter()
        .map(|t| t.expect("auction ends assigned"))
        .collect();
    let matching = Matching::from_permutation(&task_of_agent)?;
    let value = objective_value(instance, &matching, ObjectiveKind::Sum)?;
    let duals = market.duals(&costs, final_epsilon);
    Ok(AuctionSolution {
        matching,
        duals,
        trace: AuctionTrace {
            rounds,
            final_epsilon,
            price_history: history,
        },
        value,
    })
}

struct Market<'c> {
    costs: &'c IntCosts,
    big: i64,
    prices: Vec<i64>,
    task_of_agent: Vec<Option<usize>>,
    agent_of_task: Vec<Option<usize>>,
}

struct Bid {
    task: usize,
    gamma: i64,
}

impl<'c> Market<'c> {
    fn new(costs: &'c IntCosts) -> Self {
        let n = costs.rows;
        Self {
            costs,
            big: 2 * n as i64 * costs.max_abs() + 1,
            prices: vec![0; n],
            task_of_agent: vec![None; n],
            agent_of_task: vec![None; n],
        }
    }

    fn reset_assignment(&mut self) {
        self.task_of_agent.iter_mut().for_each(|t| *t = None);
        self.agent_of_task.iter_mut().for_each(|a| *a = None);
    }

    fn cost(&self, i: usize, j: usize) -> i64 {
        if self.costs.is_allowed(i, j) {
            self.costs.get(i, j)
        } else {
            self.big
        }
    }

    /// Best and second best `c_ij + p_j`, lowest index on ties.
    fn best_bid(&self, agent: usize) -> Bid {
        let n = self.prices.len();
        let mut best = (i64::MAX, 0usize);
        let mut second = i64::MAX;
        for j in 0..n {
            let value = self.cost(agent, j) + self.prices[j];
            if value < best.0 {
                second = best.0;
                best = (value, j);
            } else if value < second {
                second = value;
            }
        }
        let gamma = if n == 1 { 0 } else { second - best.0 };
        Bid { task: best.1, gamma }
    }

    fn round_limit(&self, epsilon: i64) -> u64 {
        let n = self.prices.len() as u128;
        let spread = (2 * self.big as u128) / epsilon as u128 + 2;
        (n * n * spread * 4 + 100).min(u64::MAX as u128) as u64
    }

    /// Runs until every agent is assigned; returns the number of rounds.
    fn run(&mut self, epsilon: i64, on_round: &mut dyn FnMut(&[i64])) -> SolveResult<u64> {
        let n = self.prices.len();
        let limit = self.round_limit(epsilon);
        let mut rounds = 0u64;
        let mut offers: Vec<Option<(i64, usize)>> = vec![None; n];
        loop {
            let bidders: Vec<usize> = (0..n).filter(|&i| self.task_of_agent[i].is_none()).collect();
            if bidders.is_empty() {
                return Ok(rounds);
            }
            rounds += 1;
            if rounds > limit {
                return Err(SolveError::NonConvergence { rounds });
            }
            offers.iter_mut().for_each(|o| *o = None);
            for &agent in &bidders {
                let bid = self.best_bid(agent);
                let amount = self.prices[bid.task] + bid.gamma + epsilon;
                match offers[bid.task] {
                    Some((best, _)) if best >= amount => {}
                    _ => offers[bid.task] = Some((amount, agent)),
                }
            }
            for (task, offer) in offers.iter().enumerate() {
                if let Some((amount, agent)) = *offer {
                    if let Some(previous) = self.agent_of_task[task] {
                        self.task_of_agent[previous] = None;
                    }
                    self.agent_of_task[task] = Some(agent);
                    self.task_of_agent[agent] = Some(task);
                    self.prices[task] = amount;
                }
            }
            on_round(&self.prices);
        }
    }

    fn duals(&self, costs: &IntCosts, epsilon: Rational) -> DualState {
        let n = self.prices.len();
        let u = (0..n)
            .map(|i| {
                let best = (0..n)
                    .filter(|&j| costs.is_allowed(i, j))
                    .map(|j| costs.get(i, j) + self.prices[j])
                    .min()
                    .expect("feasible rows have an allowed task");
                costs.to_rational(best)
            })
            .collect();
        let v = self.prices.iter().map(|&p| costs.to_rational(-p)).collect();
        DualState::new(u, v, epsilon)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NaiveAuctionOutcome {
    Converged {
        matching: Matching,
        rounds: u64,
    },
    /// Round at which a repeated zero-increment bid (or the round cap) was hit.
    CycleDetected {
        round: u64,
    },
}

/// Runs the auction with `epsilon = 0`. A bidder with `gamma = 0` leaves the
/// price unchanged yet still displaces the current holder, so an unassigned
/// agent can keep bidding for the same task at the same price forever. The
/// second such bid by the same agent for the same task and price is reported
/// as a cycle.
pub fn detect_naive_auction_cycle(instance: &AssignmentInstance, max_rounds: u64) -> SolveResult<NaiveAuctionOutcome> {
    if !instance.is_square() {
        return Err(SolveError::NotSquare {
            agents: instance.n_agents(),
            tasks: instance.n_tasks(),
        });
    }
    let costs = IntCosts::from_instance(&instance.to_min_cost().instance, &[])?;
    let n = costs.rows;
    let mut market = Market::new(&costs);
    let mut zero_bids: HashSet<(usize, usize, i64)> = HashSet::new();
    let mut offers: Vec<Option<(i64, usize)>> = vec![None; n];
    for round in 1..=max_rounds.max(1) {
        let bidders: Vec<usize> = (0..n).filter(|&i| market.task_of_agent[i].is_none()).collect();
        offers.iter_mut().for_each(|o| *o = None);
        for &agent in &bidders {
            let bid = market.best_bid(agent);
            let amount = market.prices[bid.task] + bid.gamma;
            if bid.gamma == 0 && !zero_bids.insert((agent, bid.task, market.prices[bid.task])) {
                return Ok(NaiveAuctionOutcome::CycleDetected { round });
            }
            match offers[bid.task] {
                Some((best, _)) if best >= amount => {}
                _ => offers[bid.task] = Some((amount, agent)),
            }
        }
        for (task, offer) in offers.iter().enumerate() {
            if let Some((amount, agent)) = *offer {
                if let Some(previous) = market.agent_of_task[task] {
                    market.task_of_agent[previous] = None;
                }
                market.agent_of_task[task] = Some(agent);
                market.task_of_agent[agent] = Some(task);
                market.prices[task] = amount;
            }
        }
        if market.task_of_agent.iter().all(Option::is_some) {
            let perm: Vec<usize> = market.task_of_agent.iter().map(|t| t.unwrap()).collect();
            return Ok(NaiveAuctionOutcome::Converged {
                matching: Matching::from_permutation(&perm)?,
                rounds: round,
            });
        }
    }
    Ok(NaiveAuctionOutcome::CycleDetected {
        round: max_rounds.max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, ratio, Sense};

    fn cost(rows: &[&[i64]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MinimizeCost).unwrap()
    }

    #[test]
    fn schedule_examples() {
        assert_eq!(
            epsilon_schedule(4, int(8)),
            vec![int(4), int(1), ratio(1, 4), ratio(1, 16)]
        );
        assert_eq!(epsilon_schedule(1, int(100)), vec![ratio(1, 2)]);
        let s = epsilon_schedule(10, int(1));
        assert_eq!(s, vec![int(1), ratio(1, 4), ratio(1, 16)]);
        assert!(*s.last().unwrap() < ratio(1, 10));
        assert!(s[..s.len() - 1].iter().all(|e| *e >= ratio(1, 10)));
    }

    #[test]
    fn single_pair_one_round() {
        let sol = solve_auction(&cost(&[&[0]]), ratio(1, 3)).unwrap();
        assert_eq!(sol.value, int(0));
        assert_eq!(sol.trace.rounds, 1);
        assert_eq!(sol.matching.pairs(), &[(0, 0)]);
    }

    #[test]
    fn small_epsilon_is_exact() {
        let inst = cost(&[&[4, 1, 3, 2], &[2, 0, 5, 3], &[3, 2, 2, 1], &[4, 3, 1, 5]]);
        let sol = solve_auction(&inst, ratio(1, 5)).unwrap();
        assert_eq!(sol.value, crate::hungarian::solve_hungarian(&inst).unwrap().value);
        sol.duals.check_feasible(&inst).unwrap();
        sol.duals.check_complementary_slackness(&inst, &sol.matching).unwrap();
    }

    #[test]
    fn price_history_is_monotone() {
        let inst = cost(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 2]]);
        let config = AuctionConfig {
            schedule: vec![ratio(1, 4)],
            record_prices: true,
        };
        let sol = solve_auction_with(&inst, &config).unwrap();
        let history = sol.trace.price_history.unwrap();
        assert_eq!(history.len() as u64, sol.trace.rounds);
        for pair in history.windows(2) {
            assert!(pair[0].iter().zip(&pair[1]).all(|(a, b)| a <= b));
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            solve_auction(&cost(&[&[1]]), int(0)),
            Err(SolveError::InvalidEpsilon(_))
        ));
        assert!(matches!(
            solve_auction(&cost(&[&[1]]), int(-1)),
            Err(SolveError::InvalidEpsilon(_))
        ));
        assert!(matches!(
            solve_auction(&cost(&[&[1, 2]]), int(1)),
            Err(SolveError::NotSquare { .. })
        ));
        let blocked = cost(&[&[1, 2], &[3, 4]]).with_forbidden([(0, 0), (1, 0)]).unwrap();
        assert!(matches!(
            solve_auction(&blocked, int(1)),
            Err(SolveError::Infeasible(_))
        ));
    }

    #[test]
    fn forbidden_pairs_respected() {
        let inst = cost(&[&[1, 2], &[4, 3]]).with_forbidden([(0, 0)]).unwrap();
        let sol = solve_auction(&inst, ratio(1, 3)).unwrap();
        assert_eq!(sol.value, int(6));
    }

    #[test]
    fn naive_auction_cycles_on_ties() {
        assert_eq!(
            detect_naive_auction_cycle(&cost(&[&[1, 1], &[1, 1]]), 100).unwrap(),
            NaiveAuctionOutcome::CycleDetected { round: 2 }
        );
    }

    #[test]
    fn naive_auction_converges_without_ties() {
        match detect_naive_auction_cycle(&cost(&[&[1, 2], &[4, 3]]), 100).unwrap() {
            NaiveAuctionOutcome::Converged { matching, .. } => {
                assert_eq!(matching.pairs(), &[(0, 0), (1, 1)]);
            }
            other => panic!("expected convergence, got {other:?}"),
        }
        assert!(matches!(
            detect_naive_auction_cycle(&cost(&[&[5]]), 1).unwrap(),
            NaiveAuctionOutcome::Converged { rounds: 1, .. }
        ));
    }
}

//! Exhaustive reference solver.
//!
//! Enumerates every feasible candidate for a problem shape and keeps the
//! optimal ones. It shares only the data types of `fleetassign-model` with
//! the real solvers and evaluates objectives with its own code, so a solver
//! bug cannot leak into the ground truth.

use fleetassign_model::{AssignmentInstance, ObjectiveKind, Rational, Sense, SideConstraintSet};
use thiserror::Error;

/// Largest `min(n, m)` the oracle accepts.
pub const ORACLE_LIMIT: usize = 9;
/// Largest number of candidates the oracle is willing to enumerate.
pub const CANDIDATE_LIMIT: u128 = 20_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("oracle limit: {0}")]
    Limit(String),
    #[error("infeasible: no candidate satisfies the constraints")]
    Infeasible,
    #[error("unsupported query: {0}")]
    Unsupported(String),
}

/// Problem-specific extras on top of the plain objective.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Extras {
    /// Semi-assignment: category `j` receives exactly `demand[j]` agents.
    Demand(Vec<usize>),
    /// Only budget-feasible perfect matchings are candidates.
    Constraints(SideConstraintSet),
    /// Partial matchings over qualified pairs, maximizing total profit.
    Qualification,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub best_value: Rational,
    /// Optimal candidates as `(agent, task)` lists sorted by agent. For
    /// semi-assignment the task is the category index and may repeat.
    pub best_matchings: Vec<Vec<(usize, usize)>>,
    /// Number of feasible candidates examined.
    pub enumerated: u64,
}

/// Collects every optimum.
pub fn brute_force(
    instance: &AssignmentInstance,
    objective: ObjectiveKind,
    extras: Option<&Extras>,
) -> Result<OracleResult, OracleError> {
    brute_force_with(instance, objective, extras, true)
}

/// Like [`brute_force`]; with `all_optima == false` only the first optimum
/// in enumeration order is kept.
pub fn brute_force_with(
    instance: &AssignmentInstance,
    objective: ObjectiveKind,
    extras: Option<&Extras>,
    all_optima: bool,
) -> Result<OracleResult, OracleError> {
    match extras {
        None => {
            let direction = direction_for(instance, objective);
            let mut search = Search::new(instance, objective, direction, all_optima)?;
            search.check_k()?;
            enumerate_injective(instance, false, &mut |pairs| search.offer(pairs))?;
            search.finish()
        }
        Some(Extras::Constraints(set)) => {
            if set
                .resources
                .iter()
                .any(|r| r.n_agents() != instance.n_agents() || r.n_tasks() != instance.n_tasks())
            {
                return Err(OracleError::Unsupported("resource shape differs from instance".into()));
            }
            let direction = direction_for(instance, objective);
            let mut search = Search::new(instance, objective, direction, all_optima)?;
            search.check_k()?;
            enumerate_injective(instance, false, &mut |pairs| {
                let within_budget = set.resources.iter().all(|r| {
                    let used = pairs
                        .iter()
                        .fold(Rational::from_integer(0), |acc, &(i, j)| acc + r.usage(i, j));
                    used <= r.budget()
                });
                if within_budget {
                    search.offer(pairs);
                }
            })?;
            search.finish()
        }
        Some(Extras::Qualification) => {
            if objective != ObjectiveKind::Sum {
                return Err(OracleError::Unsupported(
                    "qualification queries use the Sum objective".into(),
                ));
            }
            if instance.sense() != Sense::MaximizeProfit {
                return Err(OracleError::Unsupported("qualification queries maximize profit".into()));
            }
            let mut search = Search::new(instance, objective, Direction::Maximize, all_optima)?;
            enumerate_injective(instance, true, &mut |pairs| search.offer(pairs))?;
            search.finish()
        }
        Some(Extras::Demand(demand)) => {
            if objective != ObjectiveKind::Sum {
                return Err(OracleError::Unsupported("demand queries use the Sum objective".into()));
            }
            if demand.len() != instance.n_tasks() || demand.iter().sum::<usize>() != instance.n_agents() {
                return Err(OracleError::Unsupported(format!(
                    "demand {demand:?} does not fit a {}x{} instance",
                    instance.n_agents(),
                    instance.n_tasks()
                )));
            }
            let direction = direction_for(instance, objective);
            let mut search = Search::new(instance, objective, direction, all_optima)?;
            enumerate_demand(instance, demand, &mut |pairs| search.offer(pairs))?;
            search.finish()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Direction {
    Minimize,
    Maximize,
}

fn direction_for(instance: &AssignmentInstance, objective: ObjectiveKind) -> Direction {
    match (objective, instance.sense()) {
        (ObjectiveKind::Sum, Sense::MaximizeProfit) => Direction::Maximize,
        _ => Direction::Minimize,
    }
}

fn value_of(instance: &AssignmentInstance, objective: ObjectiveKind, pairs: &[(usize, usize)]) -> Option<Rational> {
    let mut values: Vec<Rational> = pairs.iter().map(|&(i, j)| instance.effective_weight(i, j)).collect();
    let total = values.iter().fold(Rational::from_integer(0), |acc, v| acc + v);
    match objective {
        ObjectiveKind::Sum => Some(total),
        ObjectiveKind::Bottleneck => values.iter().copied().max(),
        ObjectiveKind::Spread => Some(*values.iter().max()? - *values.iter().min()?),
        ObjectiveKind::MinDeviation => {
            let scale = instance.n_agents().min(instance.n_tasks()) as i64;
            Some(Rational::from_integer(scale) * *values.iter().max()? - total)
        }
        ObjectiveKind::KSum(k) => {
            values.sort();
            values.reverse();
            (k >= 1 && k <= values.len()).then(|| values[..k].iter().fold(Rational::from_integer(0), |acc, v| acc + v))
        }
    }
}

struct Search<'a> {
    instance: &'a AssignmentInstance,
    objective: ObjectiveKind,
    direction: Direction,
    all_optima: bool,
    best_value: Option<Rational>,
    best: Vec<Vec<(usize, usize)>>,
    enumerated: u64,
}

impl<'a> Search<'a> {
    fn new(
        instance: &'a AssignmentInstance,
        objective: ObjectiveKind,
        direction: Direction,
        all_optima: bool,
    ) -> Result<Self, OracleError> {
        let small = instance.n_agents().min(instance.n_tasks());
        if small > ORACLE_LIMIT {
            return Err(OracleError::Limit(format!(
                "min(n, m) = {small} exceeds {ORACLE_LIMIT}"
            )));
        }
        Ok(Self {
            instance,
            objective,
            direction,
            all_optima,
            best_value: None,
            best: Vec::new(),
            enumerated: 0,
        })
    }

    fn check_k(&self) -> Result<(), OracleError> {
        if let ObjectiveKind::KSum(k) = self.objective {
            let small = self.instance.n_agents().min(self.instance.n_tasks());
            if k == 0 || k > small {
                return Err(OracleError::Unsupported(format!("k = {k} outside 1..={small}")));
            }
        }
        Ok(())
    }

    fn offer(&mut self, pairs: &[(usize, usize)]) {
        self.enumerated += 1;
        let Some(value) = value_of(self.instance, self.objective, pairs) else {
            return;
        };
        let better = match (self.best_value, self.direction) {
            (None, _) => true,
            (Some(best), Direction::Minimize) => value < best,
            (Some(best), Direction::Maximize) => value > best,
        };
        if better {
            self.best_value = Some(value);
            self.best.clear();
        }
        if better || (self.all_optima && self.best_value == Some(value)) {
            let mut sorted = pairs.to_vec();
            sorted.sort_unstable();
            self.best.push(sorted);
        }
    }

    fn finish(self) -> Result<OracleResult, OracleError> {
        match self.best_value {
            Some(best_value) => Ok(OracleResult {
                best_value,
                best_matchings: self.best,
                enumerated: self.enumerated,
            }),
            None => Err(OracleError::Infeasible),
        }
    }
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    ((n - k + 1)..=n).map(|x| x as u128).product()
}

type Visitor<'a> = dyn FnMut(&[(usize, usize)]) + 'a;

/// Visits every injective map from the smaller side into the larger one over
/// allowed pairs. With `partial`, also visits every smaller partial map and
/// restricts to qualified pairs.
fn enumerate_injective(
    instance: &AssignmentInstance,
    partial: bool,
    visit: &mut Visitor<'_>,
) -> Result<(), OracleError> {
    let (n, m) = (instance.n_agents(), instance.n_tasks());
    let transposed = n > m;
    let (rows, cols) = if transposed { (m, n) } else { (n, m) };
    let full = falling_factorial(cols, rows);
    let estimate = if partial {
        full.saturating_mul(1 << rows.min(60))
    } else {
        full
    };
    if estimate > CANDIDATE_LIMIT {
        return Err(OracleError::Limit(format!(
            "{estimate} candidates exceed {CANDIDATE_LIMIT}"
        )));
    }
    let usable = |r: usize, c: usize| {
        let (i, j) = if transposed { (c, r) } else { (r, c) };
        instance.is_allowed(i, j) && (!partial || instance.is_qualified(i, j))
    };
    let pair = |r: usize, c: usize| if transposed { (c, r) } else { (r, c) };

    #[allow(clippy::too_many_arguments)]
    fn recurse(
        row: usize,
        rows: usize,
        cols: usize,
        partial: bool,
        used: &mut Vec<bool>,
        chosen: &mut Vec<(usize, usize)>,
        usable: &dyn Fn(usize, usize) -> bool,
        pair: &dyn Fn(usize, usize) -> (usize, usize),
        visit: &mut Visitor<'_>,
    ) {
        if row == rows {
            visit(chosen);
            return;
        }
        if partial {
            recurse(row + 1, rows, cols, partial, used, chosen, usable, pair, visit);
        }
        for c in 0..cols {
            if !used[c] && usable(row, c) {
                used[c] = true;
                chosen.push(pair(row, c));
                recurse(row + 1, rows, cols, partial, used, chosen, usable, pair, visit);
                chosen.pop();
                used[c] = false;
            }
        }
    }

    let mut used = vec![false; cols];
    let mut chosen = Vec::with_capacity(rows);
    if partial {
        // a partial map may leave rows of either side unmatched, so enumerate
        // from the agent side without transposition
        let usable_direct = |i: usize, j: usize| instance.is_allowed(i, j) && instance.is_qualified(i, j);
        let direct = |i: usize, j: usize| (i, j);
        let mut used = vec![false; m];
        recurse(0, n, m, true, &mut used, &mut chosen, &usable_direct, &direct, visit);
    } else {
        recurse(0, rows, cols, false, &mut used, &mut chosen, &usable, &pair, visit);
    }
    Ok(())
}

/// Visits every map agent -> category where category `j` gets exactly `demand[j]` agents.
fn enumerate_demand(
    instance: &AssignmentInstance,
    demand: &[usize],
    visit: &mut Visitor<'_>,
) -> Result<(), OracleError> {
    let n = instance.n_agents();
    let mut count: u128 = (1..=n as u128).product();
    for &d in demand {
        count /= (1..=d as u128).product::<u128>();
    }
    if count > CANDIDATE_LIMIT {
        return Err(OracleError::Limit(format!(
            "{count} candidates exceed {CANDIDATE_LIMIT}"
        )));
    }

    fn recurse(
        agent: usize,
        instance: &AssignmentInstance,
        remaining: &mut Vec<usize>,
        chosen: &mut Vec<(usize, usize)>,
        visit: &mut Visitor<'_>,
    ) {
        if agent == instance.n_agents() {
            visit(chosen);
            return;
        }
        for j in 0..remaining.len() {
            if remaining[j] > 0 && instance.is_allowed(agent, j) {
                remaining[j] -= 1;
                chosen.push((agent, j));
                recurse(agent + 1, instance, remaining, chosen, visit);
                chosen.pop();
                remaining[j] += 1;
            }
        }
    }

    let mut remaining = demand.to_vec();
    let mut chosen = Vec::with_capacity(n);
    recurse(0, instance, &mut remaining, &mut chosen, visit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, Resource};

    fn cost(rows: &[&[i64]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MinimizeCost).unwrap()
    }

    #[test]
    fn two_by_two_sum() {
        let r = brute_force(&cost(&[&[1, 2], &[4, 3]]), ObjectiveKind::Sum, None).unwrap();
        assert_eq!(r.best_value, int(4));
        assert_eq!(r.enumerated, 2);
        assert_eq!(r.best_matchings, vec![vec![(0, 0), (1, 1)]]);
    }

    #[test]
    fn single_entry() {
        let inst = cost(&[&[7]]);
        for objective in [ObjectiveKind::Sum, ObjectiveKind::Bottleneck] {
            assert_eq!(brute_force(&inst, objective, None).unwrap().best_value, int(7));
        }
    }

    #[test]
    fn bottleneck_unique_diagonal() {
        let r = brute_force(&cost(&[&[1, 5], &[5, 1]]), ObjectiveKind::Bottleneck, None).unwrap();
        assert_eq!(r.best_value, int(1));
        assert_eq!(r.best_matchings, vec![vec![(0, 0), (1, 1)]]);
    }

    #[test]
    fn all_optima_versus_first() {
        let inst = cost(&[&[1, 1, 1], &[1, 1, 1], &[1, 1, 1]]);
        let all = brute_force(&inst, ObjectiveKind::Sum, None).unwrap();
        assert_eq!(all.best_matchings.len(), 6);
        let first = brute_force_with(&inst, ObjectiveKind::Sum, None, false).unwrap();
        assert_eq!(first.best_matchings.len(), 1);
        assert_eq!(first.enumerated, 6);
    }

    #[test]
    fn rectangular_enumerates_injective_maps() {
        let inst = cost(&[&[5, 1, 3, 2]]);
        let r = brute_force(&inst, ObjectiveKind::Sum, None).unwrap();
        assert_eq!(r.enumerated, 4);
        assert_eq!(r.best_value, int(1));
        let tall = cost(&[&[5], &[1], &[3]]);
        let r = brute_force(&tall, ObjectiveKind::Sum, None).unwrap();
        assert_eq!(r.enumerated, 3);
        assert_eq!(r.best_matchings, vec![vec![(1, 0)]]);
    }

    #[test]
    fn forbidden_pairs_are_skipped() {
        let inst = cost(&[&[1, 2], &[4, 3]]).with_forbidden([(0, 0)]).unwrap();
        let r = brute_force(&inst, ObjectiveKind::Sum, None).unwrap();
        assert_eq!(r.enumerated, 1);
        assert_eq!(r.best_value, int(6));
        let blocked = cost(&[&[1, 2], &[4, 3]]).with_forbidden([(0, 0), (0, 1)]).unwrap();
        assert_eq!(
            brute_force(&blocked, ObjectiveKind::Sum, None),
            Err(OracleError::Infeasible)
        );
    }

    #[test]
    fn semi_assignment_example() {
        let inst = cost(&[&[1, 9], &[1, 9], &[9, 1]]);
        let r = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Demand(vec![2, 1]))).unwrap();
        assert_eq!(r.enumerated, 3);
        assert_eq!(r.best_value, int(3));
        assert_eq!(r.best_matchings, vec![vec![(0, 0), (1, 0), (2, 1)]]);
    }

    #[test]
    fn qualification_partial_maps() {
        let inst = AssignmentInstance::from_integers(&[[5, 1], [1, 7]], Sense::MaximizeProfit)
            .unwrap()
            .with_qualification(vec![vec![true, false], vec![false, true]])
            .unwrap();
        let r = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Qualification)).unwrap();
        // empty, {(0,0)}, {(1,1)}, both
        assert_eq!(r.enumerated, 4);
        assert_eq!(r.best_value, int(12));
        let none = inst.clone().with_qualification(vec![vec![false; 2]; 2]).unwrap();
        let r = brute_force(&none, ObjectiveKind::Sum, Some(&Extras::Qualification)).unwrap();
        assert_eq!(r.best_value, int(0));
        assert_eq!(r.best_matchings, vec![vec![]]);
    }

    #[test]
    fn side_constraint_filter() {
        let inst = cost(&[&[1, 2], &[4, 3]]);
        let r = Resource::new(vec![vec![int(1), int(0)], vec![int(0), int(1)]], int(1)).unwrap();
        let set = SideConstraintSet::new(vec![r]);
        let res = brute_force(&inst, ObjectiveKind::Sum, Some(&Extras::Constraints(set))).unwrap();
        assert_eq!(res.best_value, int(6));
        assert_eq!(res.enumerated, 1);
    }

    #[test]
    fn guard() {
        let inst = AssignmentInstance::from_integers(&vec![vec![0i64; 10]; 10], Sense::MinimizeCost).unwrap();
        assert!(matches!(
            brute_force(&inst, ObjectiveKind::Sum, None),
            Err(OracleError::Limit(_))
        ));
    }

    #[test]
    fn k_out_of_range() {
        let inst = cost(&[&[1, 2], &[4, 3]]);
        assert!(brute_force(&inst, ObjectiveKind::KSum(3), None).is_err());
        assert_eq!(
            brute_force(&inst, ObjectiveKind::KSum(1), None).unwrap().best_value,
            int(3)
        );
    }
}

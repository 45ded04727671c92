//! Sum of the k largest matched weights.
//!
//! For any threshold `t`, `k t + sum_i max(c_i - t, 0)` bounds the sum of the
//! k largest of the `c_i` from above, with equality at `t` equal to the k-th
//! largest value. Minimizing `k t + LAP(max(c - t, 0))` over the distinct
//! weights therefore yields the optimum.

use fleetassign_model::objective::evaluate;
use fleetassign_model::{AssignmentInstance, Matching, ObjectiveKind, Rational};

use crate::error::{SolveError, SolveResult};
use crate::hungarian::solve_int;
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KSumSolution {
    pub matching: Matching,
    pub value: Rational,
    /// `(t, k t + clipped LAP)` for every threshold tried.
    pub sweep: Vec<(Rational, Rational)>,
}

pub fn solve_k_sum(instance: &AssignmentInstance, k: usize) -> SolveResult<KSumSolution> {
    let costs = IntCosts::square_cost(instance)?;
    let n = costs.rows;
    if k == 0 || k > n {
        return Err(SolveError::KOutOfRange { k, n });
    }
    let mut sweep = Vec::new();
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for t in costs.distinct_values() {
        let clipped = IntCosts::from_parts(
            n,
            n,
            costs.values.iter().map(|&c| (c - t).max(0)).collect(),
            costs.allowed.clone(),
            costs.scale,
        )?;
        let lap = solve_int(&clipped)
            .ok_or_else(|| SolveError::Infeasible("no perfect matching over allowed pairs".into()))?;
        sweep.push((costs.to_rational(t), costs.to_rational(k as i64 * t + lap.total)));
        let matched: Vec<Rational> = lap
            .task_of_agent
            .iter()
            .enumerate()
            .map(|(i, &j)| costs.to_rational(costs.get(i, j)))
            .collect();
        let value = evaluate(&matched, n, ObjectiveKind::KSum(k))?;
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, lap.task_of_agent));
        }
    }
    let (value, perm) = best.ok_or_else(|| SolveError::Infeasible("no allowed pairs".into()))?;
    Ok(KSumSolution {
        matching: Matching::from_permutation(&perm)?,
        value,
        sweep,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, Sense};

    fn cost(rows: &[&[i64]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MinimizeCost).unwrap()
    }

    #[test]
    fn extremes_match_bottleneck_and_sum() {
        let inst = cost(&[&[4, 1, 3], &[2, 0, 5], &[3, 2, 2]]);
        let bottleneck = crate::threshold::solve_bottleneck(&inst).unwrap().threshold;
        assert_eq!(solve_k_sum(&inst, 1).unwrap().value, bottleneck);
        let sum = crate::hungarian::solve_hungarian(&inst).unwrap().value;
        assert_eq!(solve_k_sum(&inst, 3).unwrap().value, sum);
    }

    #[test]
    fn sweep_bounds_the_value() {
        let inst = cost(&[&[1, 7, 3], &[6, 2, 8], &[5, 4, 9]]);
        let sol = solve_k_sum(&inst, 2).unwrap();
        assert!(sol.sweep.iter().all(|(_, bound)| *bound >= sol.value));
        assert!(sol.sweep.iter().any(|(_, bound)| *bound == sol.value));
    }

    #[test]
    fn k_out_of_range() {
        let inst = cost(&[&[1, 2], &[3, 4]]);
        assert_eq!(solve_k_sum(&inst, 0), Err(SolveError::KOutOfRange { k: 0, n: 2 }));
        assert_eq!(solve_k_sum(&inst, 3), Err(SolveError::KOutOfRange { k: 3, n: 2 }));
        assert_eq!(solve_k_sum(&inst, 2).unwrap().value, int(5));
    }
}

//! Bottleneck and fair matchings via perfect-matching feasibility probes on
//! threshold subgraphs.

use fleetassign_model::{AssignmentInstance, Matching, Rational};

use crate::bipartite::BipartiteGraph;
use crate::error::{SolveError, SolveResult};
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdResult {
    pub threshold: Rational,
    pub matching: Matching,
    pub feasibility_probes: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FairSolution {
    pub matching: Matching,
    pub spread: Rational,
    /// Matched weights lie in `[lower, upper]`.
    pub lower: Rational,
    pub upper: Rational,
    pub feasibility_probes: usize,
}

/// Perfect matching using only allowed entries inside `[lo, hi]`.
fn band_matching(costs: &IntCosts, lo: i64, hi: i64) -> Option<Vec<usize>> {
    let n = costs.rows;
    let graph = BipartiteGraph::from_predicate(n, n, |i, j| {
        costs.is_allowed(i, j) && (lo..=hi).contains(&costs.get(i, j))
    });
    let (size, partners) = graph.maximum_matching();
    (size == n).then(|| partners.into_iter().map(|t| t.expect("perfect")).collect())
}

/// Smallest index `b` in `from..values.len()` whose band `[lo, values[b]]`
/// admits a perfect matching, given that the last index does.
fn smallest_upper(costs: &IntCosts, values: &[i64], lo: i64, from: usize, probes: &mut usize) -> (usize, Vec<usize>) {
    let (mut left, mut right) = (from, values.len() - 1);
    let mut best = None;
    while left < right {
        let mid = left + (right - left) / 2;
        *probes += 1;
        match band_matching(costs, lo, values[mid]) {
            Some(found) => {
                best = Some(found);
                right = mid;
            }
            None => left = mid + 1,
        }
    }
    // `best`, when set, was found at the final value of `right`
    let matching = match best {
        Some(found) => found,
        None => {
            *probes += 1;
            band_matching(costs, lo, values[left]).expect("upper end is feasible")
        }
    };
    (left, matching)
}

/// Minimizes the largest matched weight by binary search over the sorted
/// distinct weights.
pub fn solve_bottleneck(instance: &AssignmentInstance) -> SolveResult<ThresholdResult> {
    let costs = IntCosts::square_cost(instance)?;
    let values = costs.distinct_values();
    if costs.rows == 0 {
        return Err(SolveError::Infeasible("empty instance".into()));
    }
    let mut probes = 1;
    let lo = i64::MIN;
    if values.is_empty() || band_matching(&costs, lo, *values.last().unwrap()).is_none() {
        return Err(SolveError::Infeasible("no perfect matching over allowed pairs".into()));
    }
    let (index, perm) = smallest_upper(&costs, &values, lo, 0, &mut probes);
    Ok(ThresholdResult {
        threshold: costs.to_rational(values[index]),
        matching: Matching::from_permutation(&perm)?,
        feasibility_probes: probes,
    })
}

/// Minimizes `max - min` over matched weights. Lower thresholds are tried in
/// ascending order; for each, the smallest feasible upper threshold is found
/// by binary search. The best upper threshold never decreases as the lower
/// one rises, so each search starts where the previous one ended.
pub fn solve_fair_matching(instance: &AssignmentInstance) -> SolveResult<FairSolution> {
    let costs = IntCosts::square_cost(instance)?;
    let values = costs.distinct_values();
    if costs.rows == 0 || values.is_empty() {
        return Err(SolveError::Infeasible("no perfect matching over allowed pairs".into()));
    }
    let top = *values.last().unwrap();
    let mut probes = 0;
    let mut best: Option<(i64, i64, Vec<usize>)> = None;
    let mut from = 0;
    for (a, &lo) in values.iter().enumerate() {
        probes += 1;
        if band_matching(&costs, lo, top).is_none() {
            break;
        }
        let (b, perm) = smallest_upper(&costs, &values, lo, from.max(a), &mut probes);
        from = b;
        let spread = values[b] - lo;
        if best.as_ref().is_none_or(|(l, u, _)| spread < u - l) {
            best = Some((lo, values[b], perm));
        }
    }
    let (lower, upper, perm) =
        best.ok_or_else(|| SolveError::Infeasible("no perfect matching over allowed pairs".into()))?;
    Ok(FairSolution {
        matching: Matching::from_permutation(&perm)?,
        spread: costs.to_rational(upper - lower),
        lower: costs.to_rational(lower),
        upper: costs.to_rational(upper),
        feasibility_probes: probes,
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
    fn bottleneck_examples() {
        let r = solve_bottleneck(&cost(&[&[1, 5], &[5, 1]])).unwrap();
        assert_eq!(r.threshold, int(1));
        assert_eq!(r.matching.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(solve_bottleneck(&cost(&[&[7, 7], &[7, 7]])).unwrap().threshold, int(7));
    }

    #[test]
    fn bottleneck_infeasible() {
        let inst = cost(&[&[1, 5], &[5, 1]]).with_forbidden([(0, 0), (1, 0)]).unwrap();
        assert!(matches!(solve_bottleneck(&inst), Err(SolveError::Infeasible(_))));
        let profit = AssignmentInstance::from_integers(&[[1]], Sense::MaximizeProfit).unwrap();
        assert!(matches!(solve_bottleneck(&profit), Err(SolveError::WrongSense { .. })));
    }

    #[test]
    fn fair_examples() {
        let r = solve_fair_matching(&cost(&[&[1, 9], &[2, 1]])).unwrap();
        assert_eq!(r.spread, int(0));
        assert_eq!(r.matching.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(solve_fair_matching(&cost(&[&[4, 4], &[4, 4]])).unwrap().spread, int(0));
        let r = solve_fair_matching(&cost(&[&[1, 5], &[3, 8]])).unwrap();
        assert_eq!(r.spread, int(2));
    }
}

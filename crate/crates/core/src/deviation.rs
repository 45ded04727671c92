//! Minimum deviation assignment: minimize `n * max - sum` over matched weights.
//!
//! For each candidate maximum `M` (a distinct weight at or above the
//! bottleneck value) the best matching using entries `<= M` is the one with
//! the largest sum. Its true maximum may be below `M`, which only helps, so
//! the minimum over candidates is optimal.

use fleetassign_model::{AssignmentInstance, Matching, Rational};

use crate::error::{SolveError, SolveResult};
use crate::hungarian::solve_int;
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeviationSolution {
    pub matching: Matching,
    pub deviation: Rational,
    /// Candidate maxima for which a restricted LAP was solved.
    pub candidates_solved: usize,
}

pub fn solve_min_deviation(instance: &AssignmentInstance) -> SolveResult<DeviationSolution> {
    let costs = IntCosts::square_cost(instance)?;
    let n = costs.rows;
    let infeasible = || SolveError::Infeasible("no perfect matching over allowed pairs".into());
    if n == 0 {
        return Err(infeasible());
    }
    // maximize the sum by minimizing its negation
    let negated = |limit: i64| {
        let allowed = (0..n * n)
            .map(|k| costs.allowed[k] && costs.values[k] <= limit)
            .collect();
        IntCosts::from_parts(n, n, costs.values.iter().map(|v| -v).collect(), allowed, costs.scale)
    };
    let values = costs.distinct_values();
    let top = *values.last().ok_or_else(infeasible)?;
    let global = solve_int(&negated(top)?).ok_or_else(infeasible)?;
    let max_sum = -global.total;

    let mut best: Option<(i64, Vec<usize>)> = None;
    let mut solved = 0;
    let nn = n as i64;
    for &m in &values {
        // every matching with maximum m deviates by at least n*m - max_sum
        if best.as_ref().is_some_and(|(b, _)| nn * m - max_sum >= *b) {
            break;
        }
        let Some(lap) = solve_int(&negated(m)?) else {
            continue;
        };
        solved += 1;
        let actual_max = lap
            .task_of_agent
            .iter()
            .enumerate()
            .map(|(i, &j)| costs.get(i, j))
            .max()
            .unwrap();
        let deviation = nn * actual_max + lap.total;
        if best.as_ref().is_none_or(|(b, _)| deviation < *b) {
            best = Some((deviation, lap.task_of_agent));
        }
    }
    let (deviation, perm) = best.ok_or_else(infeasible)?;
    Ok(DeviationSolution {
        matching: Matching::from_permutation(&perm)?,
        deviation: costs.to_rational(deviation),
        candidates_solved: solved,
    })
}

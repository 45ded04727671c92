//! Assignment with restricted agent qualification: a partial matching over
//! qualified pairs with maximum total profit.

use fleetassign_model::{AssignmentInstance, Matching, Rational, Sense};
use num_traits::Zero;

use crate::error::{SolveError, SolveResult};
use crate::hungarian::solve_int;
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApraqSolution {
    pub matching: Matching,
    pub value: Rational,
}

/// Solves a square LAP of size `max(n, m)` whose entries are the positive
/// part of the profit on usable pairs and zero elsewhere, then keeps only
/// the usable pairs with positive profit.
pub fn solve_apraq(instance: &AssignmentInstance) -> SolveResult<ApraqSolution> {
    if instance.sense() != Sense::MaximizeProfit {
        return Err(SolveError::WrongSense {
            expected: "MaximizeProfit",
        });
    }
    let (n, m) = (instance.n_agents(), instance.n_tasks());
    let usable = |i: usize, j: usize| {
        i < n
            && j < m
            && instance.is_allowed(i, j)
            && instance.is_qualified(i, j)
            && instance.weight(i, j) > Rational::zero()
    };
    let size = n.max(m);
    let costs: Vec<Rational> = (0..size)
        .flat_map(|i| (0..size).map(move |j| (i, j)))
        .map(|(i, j)| {
            if usable(i, j) {
                -instance.weight(i, j)
            } else {
                Rational::zero()
            }
        })
        .collect();
    let square = AssignmentInstance::from_flat(size, size, costs, Sense::MinimizeCost)?;
    let costs = IntCosts::from_instance(&square, &[])?;
    let lap = solve_int(&costs).expect("complete square matrix");
    let pairs: Vec<(usize, usize)> = lap
        .task_of_agent
        .iter()
        .enumerate()
        .filter(|&(i, &j)| usable(i, j))
        .map(|(i, &j)| (i, j))
        .collect();
    let value = pairs
        .iter()
        .fold(Rational::zero(), |acc, &(i, j)| acc + instance.weight(i, j));
    Ok(ApraqSolution {
        matching: Matching::new(n, m, pairs)?,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::int;

    fn profit(rows: &[&[i64]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MaximizeProfit).unwrap()
    }

    #[test]
    fn nothing_qualified() {
        let inst = profit(&[&[5, 1], &[2, 7]])
            .with_qualification(vec![vec![false; 2]; 2])
            .unwrap();
        let sol = solve_apraq(&inst).unwrap();
        assert!(sol.matching.is_empty());
        assert_eq!(sol.value, int(0));
    }

    #[test]
    fn identity_mask() {
        let inst = profit(&[&[5, 100], &[100, 7]])
            .with_qualification(vec![vec![true, false], vec![false, true]])
            .unwrap();
        let sol = solve_apraq(&inst).unwrap();
        assert_eq!(sol.matching.pairs(), &[(0, 0), (1, 1)]);
        assert_eq!(sol.value, int(12));
    }

    #[test]
    fn rectangular_and_negative() {
        let inst = profit(&[&[3, -1, 4], &[-2, -5, -1]]);
        let sol = solve_apraq(&inst).unwrap();
        assert_eq!(sol.value, int(4));
        assert_eq!(sol.matching.pairs(), &[(0, 2)]);
    }

    #[test]
    fn rejects_cost_sense() {
        let inst = AssignmentInstance::from_integers(&[[1]], Sense::MinimizeCost).unwrap();
        assert!(matches!(solve_apraq(&inst), Err(SolveError::WrongSense { .. })));
    }
}

//! Semi-assignment: category `j` must receive exactly `d_j` agents. Each
//! category becomes `d_j` identical columns of an `n x n` LAP.

use fleetassign_model::{AssignmentInstance, Rational, SemiAssignmentDemand};
use num_traits::Zero;

use crate::error::{SolveError, SolveResult};
use crate::hungarian::solve_int;
use crate::scaled::IntCosts;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SemiAssignment {
    pub category_of_agent: Vec<usize>,
    /// Sum of the instance's own weights over the assignment.
    pub value: Rational,
}

impl SemiAssignment {
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.category_of_agent.iter().copied().enumerate().collect()
    }
}

pub fn solve_semi_assignment(
    instance: &AssignmentInstance,
    demand: &SemiAssignmentDemand,
) -> SolveResult<SemiAssignment> {
    demand.check_against(instance)?;
    let base = IntCosts::from_instance(&instance.to_min_cost().instance, &[])?;
    let n = instance.n_agents();
    let column_category: Vec<usize> = demand
        .as_slice()
        .iter()
        .enumerate()
        .flat_map(|(j, &d)| std::iter::repeat_n(j, d))
        .collect();
    let mut values = Vec::with_capacity(n * n);
    let mut allowed = Vec::with_capacity(n * n);
    for i in 0..n {
        for &j in &column_category {
            values.push(base.get(i, j));
            allowed.push(base.is_allowed(i, j));
        }
    }
    let replicated = IntCosts::from_parts(n, n, values, allowed, base.scale)?;
    let lap = solve_int(&replicated)
        .ok_or_else(|| SolveError::Infeasible("demand cannot be met over allowed pairs".into()))?;
    let category_of_agent: Vec<usize> = lap.task_of_agent.iter().map(|&c| column_category[c]).collect();
    let value = category_of_agent
        .iter()
        .enumerate()
        .fold(Rational::zero(), |acc, (i, &j)| acc + instance.effective_weight(i, j));
    Ok(SemiAssignment {
        category_of_agent,
        value,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, ModelError, Sense};

    fn demand(d: &[usize]) -> SemiAssignmentDemand {
        SemiAssignmentDemand::new(d.to_vec()).unwrap()
    }

    #[test]
    fn single_category() {
        let inst = AssignmentInstance::from_integers(&[[3], [5]], Sense::MinimizeCost).unwrap();
        let sol = solve_semi_assignment(&inst, &demand(&[2])).unwrap();
        assert_eq!(sol.category_of_agent, vec![0, 0]);
        assert_eq!(sol.value, int(8));
    }

    #[test]
    fn two_categories() {
        let inst = AssignmentInstance::from_integers(&[[1, 9], [1, 9], [9, 1]], Sense::MinimizeCost).unwrap();
        let sol = solve_semi_assignment(&inst, &demand(&[2, 1])).unwrap();
        assert_eq!(sol.value, int(3));
        assert_eq!(sol.category_of_agent, vec![0, 0, 1]);
    }

    #[test]
    fn demand_mismatch() {
        let inst = AssignmentInstance::from_integers(&[[1, 9], [1, 9], [9, 1]], Sense::MinimizeCost).unwrap();
        assert!(matches!(
            solve_semi_assignment(&inst, &demand(&[1, 1])),
            Err(SolveError::Model(ModelError::DimensionMismatch(_)))
        ));
    }
}

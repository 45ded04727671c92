use num_traits::Zero;

use crate::instance::AssignmentInstance;
use crate::matching::Matching;
use crate::rational::Rational;

/// Dual potentials `(u, v)` of the cost-form LAP. Task prices are `p_j = -v_j`.
///
/// Duals always refer to the cost form of the instance they were computed
/// for (see [`AssignmentInstance::to_min_cost`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualState {
    pub u: Vec<Rational>,
    pub v: Vec<Rational>,
    pub epsilon: Rational,
}

/// First dual constraint found violated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DualViolation {
    /// `u_i + v_j > c_ij`.
    Infeasible {
        agent: usize,
        task: usize,
        excess: Rational,
    },
    /// Matched pair with nonzero reduced cost (exact certificate).
    Slack {
        agent: usize,
        task: usize,
        reduced_cost: Rational,
    },
    /// Matched pair more than `epsilon` away from the agent's best task.
    EpsilonSlack {
        agent: usize,
        task: usize,
        gap: Rational,
    },
    Shape(String),
}

impl DualState {
    pub fn new(u: Vec<Rational>, v: Vec<Rational>, epsilon: Rational) -> Self {
        Self { u, v, epsilon }
    }

    pub fn dual_objective(&self) -> Rational {
        self.u.iter().chain(&self.v).fold(Rational::zero(), |acc, x| acc + x)
    }

    pub fn prices(&self) -> Vec<Rational> {
        self.v.iter().map(|v| -v).collect()
    }

    fn check_shape(&self, costs: &AssignmentInstance) -> Result<(), DualViolation> {
        if self.u.len() != costs.n_agents() || self.v.len() != costs.n_tasks() {
            return Err(DualViolation::Shape(format!(
                "duals {}x{} for a {}x{} instance",
                self.u.len(),
                self.v.len(),
                costs.n_agents(),
                costs.n_tasks()
            )));
        }
        Ok(())
    }

    /// Checks `u_i + v_j <= c_ij` on every allowed pair.
    pub fn check_feasible(&self, instance: &AssignmentInstance) -> Result<(), DualViolation> {
        let costs = instance.to_min_cost().instance;
        self.check_shape(&costs)?;
        for (i, j) in costs.allowed_pairs() {
            let excess = self.u[i] + self.v[j] - costs.weight(i, j);
            if excess > Rational::zero() {
                return Err(DualViolation::Infeasible {
                    agent: i,
                    task: j,
                    excess,
                });
            }
        }
        Ok(())
    }

    /// With `epsilon == 0`, every matched pair must have zero reduced cost.
    /// Otherwise checks epsilon-complementary slackness with prices `-v`:
    /// `c_ij + p_j <= min_k (c_ik + p_k) + epsilon`.
    pub fn check_complementary_slackness(
        &self,
        instance: &AssignmentInstance,
        matching: &Matching,
    ) -> Result<(), DualViolation> {
        let costs = instance.to_min_cost().instance;
        self.check_shape(&costs)?;
        for &(i, j) in matching.pairs() {
            if self.epsilon.is_zero() {
                let reduced_cost = costs.weight(i, j) - self.u[i] - self.v[j];
                if !reduced_cost.is_zero() {
                    return Err(DualViolation::Slack {
                        agent: i,
                        task: j,
                        reduced_cost,
                    });
                }
            } else {
                let best = (0..costs.n_tasks())
                    .filter(|&k| costs.is_allowed(i, k))
                    .map(|k| costs.weight(i, k) - self.v[k])
                    .min()
                    .expect("matched agent has an allowed task");
                let gap = costs.weight(i, j) - self.v[j] - best;
                if gap > self.epsilon {
                    return Err(DualViolation::EpsilonSlack { agent: i, task: j, gap });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Sense;
    use crate::rational::{int, ratio};

    fn two_by_two() -> AssignmentInstance {
        AssignmentInstance::from_integers(&[[1, 2], [4, 3]], Sense::MinimizeCost).unwrap()
    }

    #[test]
    fn exact_certificate_checks() {
        let inst = two_by_two();
        let duals = DualState::new(vec![int(0), int(2)], vec![int(1), int(1)], int(0));
        duals.check_feasible(&inst).unwrap();
        let m = Matching::from_permutation(&[0, 1]).unwrap();
        duals.check_complementary_slackness(&inst, &m).unwrap();
        assert_eq!(duals.dual_objective(), int(4));

        let bad = DualState::new(vec![int(1), int(2)], vec![int(1), int(1)], int(0));
        assert!(matches!(
            bad.check_feasible(&inst),
            Err(DualViolation::Infeasible { agent: 0, task: 0, .. })
        ));
    }

    #[test]
    fn epsilon_slackness() {
        let inst = two_by_two();
        // prices 0 and 1/2: agent 0 sees costs [1, 5/2]
        let duals = DualState::new(vec![int(1), ratio(7, 2)], vec![int(0), ratio(-1, 2)], ratio(1, 4));
        let m = Matching::from_permutation(&[0, 1]).unwrap();
        duals.check_complementary_slackness(&inst, &m).unwrap();
        let swapped = Matching::from_permutation(&[1, 0]).unwrap();
        assert!(matches!(
            duals.check_complementary_slackness(&inst, &swapped),
            Err(DualViolation::EpsilonSlack { agent: 0, .. })
        ));
    }
}

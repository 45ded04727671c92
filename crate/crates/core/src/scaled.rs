//! Exact integer image of a rational cost matrix.
//!
//! Every weight is multiplied by the least common multiple of all
//! denominators involved, so solvers work on `i64` without rounding. Values
//! convert back with [`IntCosts::to_rational`].

use fleetassign_model::rational::common_denominator;
use fleetassign_model::{AssignmentInstance, Rational, Sense};
use num_integer::Integer;

use crate::error::{SolveError, SolveResult};

#[derive(Debug, Clone)]
pub struct IntCosts {
    pub rows: usize,
    pub cols: usize,
    pub values: Vec<i64>,
    pub allowed: Vec<bool>,
    pub scale: i64,
}

impl IntCosts {
    /// Integer image of a cost-form instance. `extra` rationals (epsilons,
    /// thresholds) are folded into the common denominator.
    pub fn from_instance(instance: &AssignmentInstance, extra: &[Rational]) -> SolveResult<Self> {
        if instance.sense() != Sense::MinimizeCost {
            return Err(SolveError::WrongSense { expected: "cost-form" });
        }
        let (rows, cols) = (instance.n_agents(), instance.n_tasks());
        let effective: Vec<Rational> = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| instance.effective_weight(i, j))
            .collect();
        let scale = common_denominator(effective.iter().chain(extra))
            .ok_or_else(|| SolveError::Overflow("common denominator".into()))?;
        let values = effective
            .iter()
            .map(|w| scale_value(w, scale))
            .collect::<SolveResult<Vec<i64>>>()?;
        let allowed = (0..rows)
            .flat_map(|i| (0..cols).map(move |j| (i, j)))
            .map(|(i, j)| instance.is_allowed(i, j))
            .collect();
        let costs = Self {
            rows,
            cols,
            values,
            allowed,
            scale,
        };
        costs.check_headroom()?;
        Ok(costs)
    }

    pub fn from_parts(rows: usize, cols: usize, values: Vec<i64>, allowed: Vec<bool>, scale: i64) -> SolveResult<Self> {
        let costs = Self {
            rows,
            cols,
            values,
            allowed,
            scale,
        };
        costs.check_headroom()?;
        Ok(costs)
    }

    /// Forbidden entries are priced at `2 n max + 1`, and potentials can
    /// accumulate `n` of those.
    fn check_headroom(&self) -> SolveResult<()> {
        let n = self.rows.max(self.cols).max(1) as i128;
        let max = self.max_abs() as i128 + 1;
        if max * n * n * 16 >= i64::MAX as i128 {
            return Err(SolveError::Overflow(format!(
                "largest scaled weight {max} with n = {n}"
            )));
        }
        Ok(())
    }

    /// Integer image of a square cost-form instance, the common entry point
    /// of the variant solvers.
    pub fn square_cost(instance: &AssignmentInstance) -> SolveResult<Self> {
        if !instance.is_square() {
            return Err(SolveError::NotSquare {
                agents: instance.n_agents(),
                tasks: instance.n_tasks(),
            });
        }
        if instance.sense() != Sense::MinimizeCost {
            return Err(SolveError::WrongSense {
                expected: "MinimizeCost",
            });
        }
        Self::from_instance(instance, &[])
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.values[i * self.cols + j]
    }

    pub fn is_allowed(&self, i: usize, j: usize) -> bool {
        self.allowed[i * self.cols + j]
    }

    pub fn max_abs(&self) -> i64 {
        self.values
            .iter()
            .zip(&self.allowed)
            .filter(|(_, &a)| a)
            .map(|(v, _)| v.abs())
            .max()
            .unwrap_or(0)
    }

    pub fn to_rational(&self, value: i64) -> Rational {
        Rational::new(value, self.scale)
    }

    pub fn to_scaled(&self, value: &Rational) -> SolveResult<i64> {
        scale_value(value, self.scale)
    }

    /// Sorted distinct allowed values.
    pub fn distinct_values(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self
            .values
            .iter()
            .zip(&self.allowed)
            .filter(|(_, &a)| a)
            .map(|(&v, _)| v)
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

fn scale_value(value: &Rational, scale: i64) -> SolveResult<i64> {
    let denom = *value.denom();
    debug_assert!(scale.is_multiple_of(&denom));
    value
        .numer()
        .checked_mul(scale / denom)
        .ok_or_else(|| SolveError::Overflow(format!("{value} scaled by {scale}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use fleetassign_model::{int, ratio};

    #[test]
    fn scales_to_common_denominator() {
        let inst = AssignmentInstance::new(
            vec![vec![ratio(1, 2), int(1)], vec![ratio(1, 3), int(0)]],
            Sense::MinimizeCost,
        )
        .unwrap();
        let c = IntCosts::from_instance(&inst, &[ratio(1, 4)]).unwrap();
        assert_eq!(c.scale, 12);
        assert_eq!(c.values, vec![6, 12, 4, 0]);
        assert_eq!(c.to_rational(3), ratio(1, 4));
        assert_eq!(c.distinct_values(), vec![0, 4, 6, 12]);
    }

    #[test]
    fn rejects_profit_instances() {
        let inst = AssignmentInstance::from_integers(&[[1]], Sense::MaximizeProfit).unwrap();
        assert!(IntCosts::from_instance(&inst, &[]).is_err());
    }

    #[test]
    fn detects_overflow() {
        let inst = AssignmentInstance::from_integers(&[[i64::MAX / 4, 0], [0, 0]], Sense::MinimizeCost).unwrap();
        assert!(matches!(
            IntCosts::from_instance(&inst, &[]),
            Err(SolveError::Overflow(_))
        ));
    }
}

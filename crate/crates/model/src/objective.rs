use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::instance::AssignmentInstance;
use crate::matching::Matching;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// Total weight.
    Sum,
    /// Largest matched weight.
    Bottleneck,
    /// Largest minus smallest matched weight.
    Spread,
    /// `min(n, m) * max - sum` over matched weights.
    MinDeviation,
    /// Sum of the `k` largest matched weights.
    KSum(usize),
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ObjectiveKind::Sum => f.write_str("sum"),
            ObjectiveKind::Bottleneck => f.write_str("bottleneck"),
            ObjectiveKind::Spread => f.write_str("fair"),
            ObjectiveKind::MinDeviation => f.write_str("mindev"),
            ObjectiveKind::KSum(k) => write!(f, "ksum:{k}"),
        }
    }
}

impl FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sum" => Ok(Self::Sum),
            "bottleneck" => Ok(Self::Bottleneck),
            "fair" | "spread" => Ok(Self::Spread),
            "mindev" => Ok(Self::MinDeviation),
            other => match other.strip_prefix("ksum:") {
                Some(k) => k.parse().map(Self::KSum).map_err(|_| format!("bad k in {other:?}")),
                None => Err(format!("unknown objective {other:?}")),
            },
        }
    }
}

/// Evaluates `objective` on the effective weights of the matched pairs.
pub fn objective_value(
    instance: &AssignmentInstance,
    matching: &Matching,
    objective: ObjectiveKind,
) -> Result<Rational, ModelError> {
    if matching.n_agents() != instance.n_agents() || matching.n_tasks() != instance.n_tasks() {
        return Err(ModelError::DimensionMismatch(format!(
            "{}x{} matching for a {}x{} instance",
            matching.n_agents(),
            matching.n_tasks(),
            instance.n_agents(),
            instance.n_tasks()
        )));
    }
    let values: Vec<Rational> = matching
        .pairs()
        .iter()
        .map(|&(i, j)| instance.effective_weight(i, j))
        .collect();
    evaluate(&values, instance.n_agents().min(instance.n_tasks()), objective)
}

/// Objective over a bag of matched weights. `scale` is the `min(n, m)` factor
/// of [`ObjectiveKind::MinDeviation`].
pub fn evaluate(values: &[Rational], scale: usize, objective: ObjectiveKind) -> Result<Rational, ModelError> {
    let sum = || values.iter().fold(Rational::zero(), |acc, v| acc + v);
    match objective {
        ObjectiveKind::Sum => Ok(sum()),
        ObjectiveKind::Bottleneck => values.iter().copied().max().ok_or(ModelError::EmptyMatching),
        ObjectiveKind::Spread => {
            let max = values.iter().max().ok_or(ModelError::EmptyMatching)?;
            let min = values.iter().min().ok_or(ModelError::EmptyMatching)?;
            Ok(max - min)
        }
        ObjectiveKind::MinDeviation => {
            let max = values.iter().max().ok_or(ModelError::EmptyMatching)?;
            Ok(int(scale as i64) * max - sum())
        }
        ObjectiveKind::KSum(k) => {
            if k == 0 || k > values.len() {
                return Err(ModelError::KOutOfRange { k, size: values.len() });
            }
            let mut sorted = values.to_vec();
            sorted.sort_unstable_by(|a, b| b.cmp(a));
            Ok(sorted[..k].iter().fold(Rational::zero(), |acc, v| acc + v))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Sense;

    fn inst(rows: &[[i64; 2]]) -> AssignmentInstance {
        AssignmentInstance::from_integers(rows, Sense::MinimizeCost).unwrap()
    }

    #[test]
    fn sum_of_diagonal() {
        let m = Matching::from_permutation(&[0, 1]).unwrap();
        assert_eq!(
            objective_value(&inst(&[[1, 2], [4, 3]]), &m, ObjectiveKind::Sum).unwrap(),
            int(4)
        );
    }

    #[test]
    fn single_zero_pair_bottleneck() {
        let m = Matching::new(2, 2, vec![(0, 0)]).unwrap();
        assert_eq!(
            objective_value(&inst(&[[0, 5], [5, 5]]), &m, ObjectiveKind::Bottleneck).unwrap(),
            int(0)
        );
    }

    #[test]
    fn spread_of_equal_diagonal() {
        let m = Matching::from_permutation(&[0, 1]).unwrap();
        assert_eq!(
            objective_value(&inst(&[[1, 9], [2, 1]]), &m, ObjectiveKind::Spread).unwrap(),
            int(0)
        );
    }

    #[test]
    fn min_deviation_and_ksum() {
        let i = inst(&[[1, 2], [4, 3]]);
        let anti = Matching::from_permutation(&[1, 0]).unwrap();
        // weights {2, 4}: 2*4 - 6
        assert_eq!(objective_value(&i, &anti, ObjectiveKind::MinDeviation).unwrap(), int(2));
        assert_eq!(objective_value(&i, &anti, ObjectiveKind::KSum(1)).unwrap(), int(4));
        assert_eq!(objective_value(&i, &anti, ObjectiveKind::KSum(2)).unwrap(), int(6));
    }

    #[test]
    fn errors() {
        let i = inst(&[[1, 2], [4, 3]]);
        let empty = Matching::empty(2, 2);
        assert_eq!(
            objective_value(&i, &empty, ObjectiveKind::Spread),
            Err(ModelError::EmptyMatching)
        );
        assert_eq!(
            objective_value(&i, &empty, ObjectiveKind::Bottleneck),
            Err(ModelError::EmptyMatching)
        );
        assert_eq!(objective_value(&i, &empty, ObjectiveKind::Sum).unwrap(), int(0));
        let one = Matching::new(2, 2, vec![(0, 0)]).unwrap();
        assert!(matches!(
            objective_value(&i, &one, ObjectiveKind::KSum(2)),
            Err(ModelError::KOutOfRange { k: 2, size: 1 })
        ));
    }

    #[test]
    fn objective_names_round_trip() {
        for kind in [
            ObjectiveKind::Sum,
            ObjectiveKind::Bottleneck,
            ObjectiveKind::Spread,
            ObjectiveKind::MinDeviation,
            ObjectiveKind::KSum(3),
        ] {
            assert_eq!(kind.to_string().parse::<ObjectiveKind>().unwrap(), kind);
        }
    }
}

use std::fmt;
use std::str::FromStr;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matching::Matching;
use crate::rational::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sense {
    #[serde(rename = "min")]
    MinimizeCost,
    #[serde(rename = "max")]
    MaximizeProfit,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::MinimizeCost => "min",
            Sense::MaximizeProfit => "max",
        })
    }
}

impl FromStr for Sense {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(Sense::MinimizeCost),
            "max" => Ok(Sense::MaximizeProfit),
            other => Err(format!("unknown sense {other:?} (expected min or max)")),
        }
    }
}

/// A dense two-dimensional assignment instance.
///
/// Weights are costs under [`Sense::MinimizeCost`] and profits under
/// [`Sense::MaximizeProfit`]. Forbidden pairs are kept in an explicit mask;
/// solvers never see a sentinel weight from this type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AssignmentInstance {
    n_agents: usize,
    n_tasks: usize,
    weights: Vec<Rational>,
    sense: Sense,
    qualification: Option<Vec<bool>>,
    forbidden: Vec<bool>,
}

impl AssignmentInstance {
    pub fn new(rows: Vec<Vec<Rational>>, sense: Sense) -> Result<Self, ModelError> {
        let n_agents = rows.len();
        let n_tasks = rows.first().map_or(0, Vec::len);
        if n_agents == 0 || n_tasks == 0 {
            return Err(ModelError::EmptyDimension {
                agents: n_agents,
                tasks: n_tasks,
            });
        }
        let mut weights = Vec::with_capacity(n_agents * n_tasks);
        for (row_index, row) in rows.into_iter().enumerate() {
            if row.len() != n_tasks {
                return Err(ModelError::RaggedRow {
                    row: row_index,
                    found: row.len(),
                    expected: n_tasks,
                });
            }
            weights.extend(row);
        }
        Ok(Self {
            n_agents,
            n_tasks,
            weights,
            sense,
            qualification: None,
            forbidden: vec![false; n_agents * n_tasks],
        })
    }

    pub fn from_integers<R: AsRef<[i64]>>(rows: &[R], sense: Sense) -> Result<Self, ModelError> {
        Self::new(
            rows.iter()
                .map(|row| row.as_ref().iter().map(|&w| int(w)).collect())
                .collect(),
            sense,
        )
    }

    /// Builds an instance from a row-major weight vector.
    pub fn from_flat(
        n_agents: usize,
        n_tasks: usize,
        weights: Vec<Rational>,
        sense: Sense,
    ) -> Result<Self, ModelError> {
        if n_agents == 0 || n_tasks == 0 {
            return Err(ModelError::EmptyDimension {
                agents: n_agents,
                tasks: n_tasks,
            });
        }
        if weights.len() != n_agents * n_tasks {
            return Err(ModelError::DimensionMismatch(format!(
                "{} weights for a {n_agents}x{n_tasks} instance",
                weights.len()
            )));
        }
        Ok(Self {
            n_agents,
            n_tasks,
            weights,
            sense,
            qualification: None,
            forbidden: vec![false; n_agents * n_tasks],
        })
    }

    pub fn with_qualification(mut self, rows: Vec<Vec<bool>>) -> Result<Self, ModelError> {
        if rows.len() != self.n_agents {
            return Err(ModelError::DimensionMismatch(format!(
                "qualification has {} rows, instance has {} agents",
                rows.len(),
                self.n_agents
            )));
        }
        let mut mask = Vec::with_capacity(self.n_agents * self.n_tasks);
        for (row_index, row) in rows.into_iter().enumerate() {
            if row.len() != self.n_tasks {
                return Err(ModelError::RaggedRow {
                    row: row_index,
                    found: row.len(),
                    expected: self.n_tasks,
                });
            }
            mask.extend(row);
        }
        self.qualification = Some(mask);
        Ok(self)
    }

    pub fn with_forbidden(mut self, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, ModelError> {
        for (agent, task) in pairs {
            self.check_pair(agent, task)?;
            self.forbidden[agent * self.n_tasks + task] = true;
        }
        Ok(self)
    }

    fn check_pair(&self, agent: usize, task: usize) -> Result<(), ModelError> {
        if agent >= self.n_agents || task >= self.n_tasks {
            return Err(ModelError::PairOutOfRange {
                agent,
                task,
                agents: self.n_agents,
                tasks: self.n_tasks,
            });
        }
        Ok(())
    }

    pub fn n_agents(&self) -> usize {
        self.n_agents
    }

    pub fn n_tasks(&self) -> usize {
        self.n_tasks
    }

    pub fn is_square(&self) -> bool {
        self.n_agents == self.n_tasks
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    /// The weight as written, ignoring qualification.
    pub fn weight(&self, agent: usize, task: usize) -> Rational {
        self.weights[agent * self.n_tasks + task]
    }

    /// The weight a solver should use: unqualified pairs of a profit
    /// instance are worth zero.
    pub fn effective_weight(&self, agent: usize, task: usize) -> Rational {
        if self.sense == Sense::MaximizeProfit && !self.is_qualified(agent, task) {
            Rational::zero()
        } else {
            self.weight(agent, task)
        }
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn row(&self, agent: usize) -> &[Rational] {
        &self.weights[agent * self.n_tasks..(agent + 1) * self.n_tasks]
    }

    pub fn is_forbidden(&self, agent: usize, task: usize) -> bool {
        self.forbidden[agent * self.n_tasks + task]
    }

    pub fn is_allowed(&self, agent: usize, task: usize) -> bool {
        !self.is_forbidden(agent, task)
    }

    pub fn has_forbidden(&self) -> bool {
        self.forbidden.iter().any(|&f| f)
    }

    pub fn forbidden_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n_tasks = self.n_tasks;
        self.forbidden
            .iter()
            .enumerate()
            .filter(|(_, &f)| f)
            .map(move |(k, _)| (k / n_tasks, k % n_tasks))
    }

    pub fn qualification(&self) -> Option<&[bool]> {
        self.qualification.as_deref()
    }

    /// True when no qualification mask is present.
    pub fn is_qualified(&self, agent: usize, task: usize) -> bool {
        self.qualification
            .as_ref()
            .is_none_or(|q| q[agent * self.n_tasks + task])
    }

    /// Largest absolute effective weight over allowed pairs.
    pub fn max_abs_weight(&self) -> Rational {
        let mut best = Rational::zero();
        for i in 0..self.n_agents {
            for j in 0..self.n_tasks {
                if self.is_allowed(i, j) {
                    let w = self.effective_weight(i, j);
                    let a = if w < Rational::zero() { -w } else { w };
                    if a > best {
                        best = a;
                    }
                }
            }
        }
        best
    }

    /// Allowed pairs, row-major.
    pub fn allowed_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_agents)
            .flat_map(move |i| (0..self.n_tasks).map(move |j| (i, j)))
            .filter(move |&(i, j)| self.is_allowed(i, j))
    }

    /// Rewrites a profit instance as a cost instance `c = W - p` where `W` is
    /// the largest effective profit over allowed pairs. Cost instances are
    /// returned unchanged with offset zero.
    ///
    /// On a perfect matching of an `n x n` profit instance,
    /// `Sum(cost) = n * W - Sum(profit)`.
    pub fn to_min_cost(&self) -> CostForm {
        match self.sense {
            Sense::MinimizeCost => CostForm {
                instance: self.clone(),
                offset: Rational::zero(),
            },
            Sense::MaximizeProfit => {
                let offset = self
                    .allowed_pairs()
                    .map(|(i, j)| self.effective_weight(i, j))
                    .max()
                    .unwrap_or_else(Rational::zero);
                let weights = (0..self.n_agents)
                    .flat_map(|i| (0..self.n_tasks).map(move |j| (i, j)))
                    .map(|(i, j)| offset - self.effective_weight(i, j))
                    .collect();
                CostForm {
                    instance: Self {
                        n_agents: self.n_agents,
                        n_tasks: self.n_tasks,
                        weights,
                        sense: Sense::MinimizeCost,
                        qualification: None,
                        forbidden: self.forbidden.clone(),
                    },
                    offset,
                }
            }
        }
    }

    /// Same shape and masks with every weight replaced.
    pub fn map_weights(&self, mut f: impl FnMut(usize, usize, Rational) -> Rational) -> Self {
        let n_tasks = self.n_tasks;
        let weights = self
            .weights
            .iter()
            .enumerate()
            .map(|(k, &w)| f(k / n_tasks, k % n_tasks, w))
            .collect();
        Self {
            weights,
            ..self.clone()
        }
    }

    /// Square sub-instance keeping only the listed rows and columns, in order.
    pub fn submatrix(&self, agents: &[usize], tasks: &[usize]) -> Result<Self, ModelError> {
        let rows: Vec<Vec<Rational>> = agents
            .iter()
            .map(|&i| tasks.iter().map(|&j| self.weight(i, j)).collect())
            .collect();
        let mut sub = Self::new(rows, self.sense)?;
        if let Some(q) = &self.qualification {
            sub.qualification = Some(
                agents
                    .iter()
                    .flat_map(|&i| tasks.iter().map(move |&j| q[i * self.n_tasks + j]))
                    .collect(),
            );
        }
        sub.forbidden = agents
            .iter()
            .flat_map(|&i| tasks.iter().map(move |&j| (i, j)))
            .map(|(i, j)| self.is_forbidden(i, j))
            .collect();
        Ok(sub)
    }
}

/// Result of [`AssignmentInstance::to_min_cost`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostForm {
    pub instance: AssignmentInstance,
    pub offset: Rational,
}

/// A square instance built from a rectangular one, with the map back.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaddedInstance {
    pub instance: AssignmentInstance,
    /// `agent_origin[k]` is the original agent of padded row `k`, `None` for dummies.
    pub agent_origin: Vec<Option<usize>>,
    pub task_origin: Vec<Option<usize>>,
    original_agents: usize,
    original_tasks: usize,
}

impl PaddedInstance {
    pub fn dummy_agents(&self) -> usize {
        self.agent_origin.iter().filter(|o| o.is_none()).count()
    }

    pub fn dummy_tasks(&self) -> usize {
        self.task_origin.iter().filter(|o| o.is_none()).count()
    }

    pub fn is_dummy_pair(&self, agent: usize, task: usize) -> bool {
        self.agent_origin[agent].is_none() || self.task_origin[task].is_none()
    }

    /// Drops dummy pairs and maps the rest back to original indices.
    pub fn restrict(&self, matching: &Matching) -> Matching {
        let pairs = matching
            .pairs()
            .iter()
            .filter_map(|&(i, j)| Some((self.agent_origin[i]?, self.task_origin[j]?)))
            .collect();
        Matching::new(self.original_agents, self.original_tasks, pairs)
            .expect("restriction of a conflict-free matching is conflict-free")
    }
}

/// Adds zero-weight dummy agents or tasks until the instance is square.
///
/// Dummy pairs are never forbidden and are qualified when a mask exists.
pub fn pad_to_square(instance: &AssignmentInstance) -> PaddedInstance {
    let n = instance.n_agents.max(instance.n_tasks);
    let agent_origin: Vec<Option<usize>> = (0..n).map(|i| (i < instance.n_agents).then_some(i)).collect();
    let task_origin: Vec<Option<usize>> = (0..n).map(|j| (j < instance.n_tasks).then_some(j)).collect();
    if instance.is_square() {
        return PaddedInstance {
            instance: instance.clone(),
            agent_origin,
            task_origin,
            original_agents: instance.n_agents,
            original_tasks: instance.n_tasks,
        };
    }
    let real = |i: usize, j: usize| i < instance.n_agents && j < instance.n_tasks;
    let mut weights = Vec::with_capacity(n * n);
    let mut forbidden = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            if real(i, j) {
                weights.push(instance.weight(i, j));
                forbidden.push(instance.is_forbidden(i, j));
            } else {
                weights.push(Rational::zero());
                forbidden.push(false);
            }
        }
    }
    let qualification = instance.qualification.as_ref().map(|q| {
        (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| !real(i, j) || q[i * instance.n_tasks + j])
            .collect()
    });
    PaddedInstance {
        instance: AssignmentInstance {
            n_agents: n,
            n_tasks: n,
            weights,
            sense: instance.sense,
            qualification,
            forbidden,
        },
        agent_origin,
        task_origin,
        original_agents: instance.n_agents,
        original_tasks: instance.n_tasks,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rejects_empty_and_ragged() {
        assert!(matches!(
            AssignmentInstance::new(vec![], Sense::MinimizeCost),
            Err(ModelError::EmptyDimension { .. })
        ));
        assert!(matches!(
            AssignmentInstance::from_integers(&[vec![1, 2], vec![3]], Sense::MinimizeCost),
            Err(ModelError::RaggedRow { row: 1, .. })
        ));
    }

    #[test]
    fn unqualified_profit_is_zero() {
        let inst = AssignmentInstance::from_integers(&[[5, 7]], Sense::MaximizeProfit)
            .unwrap()
            .with_qualification(vec![vec![true, false]])
            .unwrap();
        assert_eq!(inst.effective_weight(0, 0), int(5));
        assert_eq!(inst.effective_weight(0, 1), int(0));
        assert_eq!(inst.weight(0, 1), int(7));
    }

    #[test]
    fn profit_to_cost_offsets_by_max() {
        let inst = AssignmentInstance::from_integers(&[[1, 4], [2, 3]], Sense::MaximizeProfit).unwrap();
        let form = inst.to_min_cost();
        assert_eq!(form.offset, int(4));
        assert_eq!(form.instance.row(0), &[int(3), int(0)]);
        assert_eq!(form.instance.row(1), &[int(2), int(1)]);
        assert_eq!(form.instance.sense(), Sense::MinimizeCost);
    }

    #[test]
    fn pads_two_by_three_with_dummy_row() {
        let inst = AssignmentInstance::new(
            vec![vec![int(1), ratio(1, 2), int(3)], vec![int(4), int(5), int(6)]],
            Sense::MinimizeCost,
        )
        .unwrap();
        let padded = pad_to_square(&inst);
        assert_eq!(padded.instance.n_agents(), 3);
        assert_eq!(padded.instance.n_tasks(), 3);
        assert_eq!(padded.instance.row(2), &[int(0), int(0), int(0)]);
        assert_eq!(padded.instance.row(0), inst.row(0));
        assert_eq!(padded.dummy_agents(), 1);
        assert_eq!(padded.dummy_tasks(), 0);
        assert_eq!(padded.agent_origin, vec![Some(0), Some(1), None]);
    }

    #[test]
    fn padding_square_is_identity() {
        let inst = AssignmentInstance::from_integers(&[[1, 2], [4, 3]], Sense::MinimizeCost)
            .unwrap()
            .with_forbidden([(0, 1)])
            .unwrap();
        let padded = pad_to_square(&inst);
        assert_eq!(padded.instance, inst);
        assert_eq!(padded.dummy_agents() + padded.dummy_tasks(), 0);
    }

    #[test]
    fn restrict_drops_dummies() {
        let inst = AssignmentInstance::from_integers(&[[9, 1, 9, 9]], Sense::MinimizeCost).unwrap();
        let padded = pad_to_square(&inst);
        let m = Matching::new(4, 4, vec![(0, 1), (1, 0), (2, 2), (3, 3)]).unwrap();
        let back = padded.restrict(&m);
        assert_eq!(back.pairs(), &[(0, 1)]);
        assert_eq!(back.n_agents(), 1);
        assert_eq!(back.n_tasks(), 4);
    }

    #[test]
    fn forbidden_pairs_are_listed() {
        let inst = AssignmentInstance::from_integers(&[[1, 2], [4, 3]], Sense::MinimizeCost)
            .unwrap()
            .with_forbidden([(1, 0), (0, 1)])
            .unwrap();
        assert_eq!(inst.forbidden_pairs().collect::<Vec<_>>(), vec![(0, 1), (1, 0)]);
        assert!(inst.with_forbidden([(2, 0)]).is_err());
    }
}

//! Per-period decision rules. A policy only ever sees the current period:
//! the available agents and tasks and their utilities for this period.

use fleetassign_core::{
    solve_bottleneck, solve_fair_matching, solve_hungarian, solve_k_sum, solve_min_deviation, solve_semi_assignment,
    solve_with_side_constraints, SolveError,
};
use fleetassign_model::objective::evaluate;
use fleetassign_model::{
    pad_to_square, AssignmentInstance, Matching, ObjectiveKind, Rational, Resource, SemiAssignmentDemand, Sense,
    SideConstraintSet,
};
use num_traits::Zero;

use crate::error::DynamicError;
use crate::scenario::Scenario;

/// What a policy may look at in one period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeriodView {
    pub period: usize,
    /// Model agent of each row.
    pub agents: Vec<usize>,
    /// Original scenario agent of each row.
    pub agent_origin: Vec<usize>,
    /// Scenario task of each column.
    pub tasks: Vec<usize>,
    /// `|agents| x |tasks|` utilities (or costs) of this period.
    pub weights: AssignmentInstance,
    /// Agents needed by each column's task.
    pub demand: Vec<usize>,
    /// Tentative pairs still pending from earlier periods, in row/column indices.
    pub incumbent: Vec<(usize, usize)>,
}

pub trait PerPeriodPolicy {
    fn name(&self) -> String;

    /// Pairs `(row, column)` of the view to assign this period.
    fn decide(&mut self, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError>;

    /// Objective reported per period, evaluated on the cost form of the view.
    fn objective(&self) -> ObjectiveKind {
        ObjectiveKind::Sum
    }
}

/// Never assigns anything.
#[derive(Debug, Clone, Copy, Default)]
pub struct NullPolicy;

impl PerPeriodPolicy for NullPolicy {
    fn name(&self) -> String {
        "null".into()
    }

    fn decide(&mut self, _view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        Ok(Vec::new())
    }
}

/// Square cost matrix for Sum-type decisions. Under profit, rows and columns
/// are padded to `max(a, t)` with zero utility, negative utilities are
/// clipped to zero and the result is flipped to cost form. Under cost, the
/// matrix is padded with zero-cost dummies, which yields a minimum-cost
/// maximum matching.
fn sum_form(weights: &AssignmentInstance) -> AssignmentInstance {
    let padded = match weights.sense() {
        Sense::MaximizeProfit => pad_to_square(&weights.map_weights(|_, _, p| p.max(Rational::zero()))).instance,
        Sense::MinimizeCost => pad_to_square(weights).instance,
    };
    padded.to_min_cost().instance
}

/// Real pairs of a square solution, dropping dummies and, under profit,
/// pairs that earn nothing.
fn real_pairs(weights: &AssignmentInstance, pairs: &[(usize, usize)], drop_unprofitable: bool) -> Vec<(usize, usize)> {
    pairs
        .iter()
        .copied()
        .filter(|&(i, j)| i < weights.n_agents() && j < weights.n_tasks())
        .filter(|&(i, j)| {
            !(drop_unprofitable && weights.sense() == Sense::MaximizeProfit && weights.weight(i, j) <= Rational::zero())
        })
        .collect()
}

/// Per-period optimum of the Sum objective over the available submatrix.
#[derive(Debug, Clone, Copy, Default)]
pub struct MyopicPolicy;

impl PerPeriodPolicy for MyopicPolicy {
    fn name(&self) -> String {
        "myopic".into()
    }

    fn decide(&mut self, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        let sol = solve_hungarian(&sum_form(&view.weights))?;
        Ok(real_pairs(&view.weights, sol.matching.pairs(), true))
    }
}

/// Which static variant a [`VariantPolicy`] solves each period.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantSpec {
    Objective(ObjectiveKind),
    SideConstraints(SideConstraintSet),
    /// Tasks need the number of agents given by the scenario's demand.
    Demand,
}

#[derive(Debug, Clone)]
pub struct VariantPolicy {
    spec: VariantSpec,
}

/// Builds the per-period policy for a static variant, checking that it fits
/// the scenario.
pub fn per_period_variant_policy(spec: VariantSpec, scenario: &Scenario) -> Result<VariantPolicy, DynamicError> {
    match &spec {
        VariantSpec::Objective(ObjectiveKind::KSum(0)) => {
            return Err(DynamicError::Unsupported("ksum needs k >= 1".into()));
        }
        VariantSpec::SideConstraints(set) => {
            if let Some(r) = set
                .resources
                .iter()
                .find(|r| r.n_agents() != scenario.n_agents() || r.n_tasks() != scenario.n_tasks())
            {
                return Err(DynamicError::Unsupported(format!(
                    "resource is {}x{}, scenario has {} agents and {} tasks",
                    r.n_agents(),
                    r.n_tasks(),
                    scenario.n_agents(),
                    scenario.n_tasks()
                )));
            }
        }
        VariantSpec::Demand if scenario.demand().is_none() => {
            return Err(DynamicError::Unsupported(
                "demand policy needs a scenario with task demand".into(),
            ));
        }
        _ => {}
    }
    Ok(VariantPolicy { spec })
}

impl VariantPolicy {
    fn solve_objective(&self, kind: ObjectiveKind, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        if kind == ObjectiveKind::Sum {
            return MyopicPolicy.decide(view);
        }
        let padded = pad_to_square(&view.weights);
        let costs = padded.instance.to_min_cost().instance;
        let matching: Matching = match kind {
            ObjectiveKind::Bottleneck => solve_bottleneck(&costs)?.matching,
            ObjectiveKind::Spread => solve_fair_matching(&costs)?.matching,
            ObjectiveKind::MinDeviation => solve_min_deviation(&costs)?.matching,
            ObjectiveKind::KSum(k) => solve_k_sum(&costs, k.min(costs.n_agents()))?.matching,
            ObjectiveKind::Sum => unreachable!(),
        };
        Ok(padded.restrict(&matching).pairs().to_vec())
    }

    fn solve_side(&self, set: &SideConstraintSet, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        let costs = sum_form(&view.weights);
        let size = costs.n_agents();
        let resources = set
            .resources
            .iter()
            .map(|r| {
                let usage = (0..size)
                    .map(|row| {
                        (0..size)
                            .map(|col| match (view.agent_origin.get(row), view.tasks.get(col)) {
                                (Some(&i), Some(&j)) => r.usage(i, j),
                                _ => Rational::zero(),
                            })
                            .collect()
                    })
                    .collect();
                Resource::new(usage, r.budget())
            })
            .collect::<Result<Vec<_>, _>>()?;
        match solve_with_side_constraints(&costs, &SideConstraintSet::new(resources)) {
            Ok(sol) => Ok(real_pairs(&view.weights, sol.matching.pairs(), true)),
            Err(SolveError::Infeasible(_)) => Ok(Vec::new()),
            Err(e) => Err(e.into()),
        }
    }

    /// Serves a first-fit selection of tasks (in column order) whose demands
    /// fit the available agents; leftover agents go to a zero-utility dummy
    /// category.
    fn solve_demand(&self, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        let agents = view.weights.n_agents();
        let mut selected = Vec::new();
        let mut used = 0;
        for (col, &d) in view.demand.iter().enumerate() {
            if used + d <= agents {
                used += d;
                selected.push(col);
            }
        }
        if selected.is_empty() {
            return Ok(Vec::new());
        }
        let mut demand: Vec<usize> = selected.iter().map(|&c| view.demand[c]).collect();
        let spare = agents - used;
        if spare > 0 {
            demand.push(spare);
        }
        let rows: Vec<Vec<Rational>> = (0..agents)
            .map(|i| {
                let mut row: Vec<Rational> = selected.iter().map(|&c| view.weights.weight(i, c)).collect();
                if spare > 0 {
                    row.push(Rational::zero());
                }
                row
            })
            .collect();
        let instance = AssignmentInstance::new(rows, view.weights.sense())?;
        let sol = solve_semi_assignment(&instance, &SemiAssignmentDemand::new(demand)?)?;
        Ok(sol
            .category_of_agent
            .iter()
            .enumerate()
            .filter_map(|(i, &c)| selected.get(c).map(|&col| (i, col)))
            .collect())
    }
}

impl PerPeriodPolicy for VariantPolicy {
    fn name(&self) -> String {
        match &self.spec {
            VariantSpec::Objective(kind) => format!("variant:{kind}"),
            VariantSpec::SideConstraints(_) => "variant:sideconstrained".into(),
            VariantSpec::Demand => "variant:semi".into(),
        }
    }

    fn decide(&mut self, view: &PeriodView) -> Result<Vec<(usize, usize)>, DynamicError> {
        match &self.spec {
            VariantSpec::Objective(kind) => self.solve_objective(*kind, view),
            VariantSpec::SideConstraints(set) => self.solve_side(set, view),
            VariantSpec::Demand => self.solve_demand(view),
        }
    }

    fn objective(&self) -> ObjectiveKind {
        match &self.spec {
            VariantSpec::Objective(kind) => *kind,
            _ => ObjectiveKind::Sum,
        }
    }
}

/// Objective of the chosen pairs on the cost form of the view; `None` when
/// the objective is undefined for the pairs (for example an empty matching).
pub fn period_objective(view: &PeriodView, pairs: &[(usize, usize)], kind: ObjectiveKind) -> Option<Rational> {
    let costs = view.weights.to_min_cost().instance;
    let values: Vec<Rational> = pairs.iter().map(|&(i, j)| costs.weight(i, j)).collect();
    let scale = view.weights.n_agents().min(view.weights.n_tasks());
    evaluate(&values, scale, kind).ok()
}

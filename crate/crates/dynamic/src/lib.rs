//! Rolling-horizon execution of dynamic assignment models.
//!
//! Agents and tasks arrive over a finite horizon of periods. Each period a
//! policy sees only the agents and tasks available now and picks pairs; the
//! availability bits then evolve by the conservation identities. Runs can be
//! validated against every model constraint and compared with the
//! clairvoyant optimum on small scenarios.

pub mod clairvoyant;
pub mod error;
pub mod policy;
pub mod run;
pub mod scenario;
pub mod state;
pub mod validate;

pub use clairvoyant::{clairvoyant_optimum, clairvoyant_plan, ClairvoyantPlan, CLAIRVOYANT_LIMIT};
pub use error::DynamicError;
pub use policy::{
    per_period_variant_policy, MyopicPolicy, NullPolicy, PerPeriodPolicy, PeriodView, VariantPolicy, VariantSpec,
};
pub use run::{compare_modes, run_scenario, summarize, Coverage, ModeComparison, RunSummary, Trajectory};
pub use scenario::{
    emit_scenario_json, parse_scenario_json, random_scenario, Mode, Scenario, ScenarioDocument, ScenarioParams,
};
pub use state::{step, FleetState, Lifecycle, ModelAgent, PeriodOutcome};
pub use validate::{validate_trajectory, ConstraintFamily, ValidationReport};

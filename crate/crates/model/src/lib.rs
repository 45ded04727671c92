//! Core data types for two-dimensional assignment problems: instances with
//! qualification and forbidden-pair masks, conflict-free matchings, dual
//! certificates, objective evaluation and the instance file formats.

pub mod constraints;
pub mod dual;
pub mod error;
pub mod format;
pub mod generate;
pub mod instance;
pub mod matching;
pub mod objective;
pub mod rational;

pub use constraints::{Resource, SemiAssignmentDemand, SideConstraintSet};
pub use dual::{DualState, DualViolation};
pub use error::{ModelError, ParseError};
pub use instance::{pad_to_square, AssignmentInstance, CostForm, PaddedInstance, Sense};
pub use matching::Matching;
pub use objective::{objective_value, ObjectiveKind};
pub use rational::{int, ratio, Rational, RationalValue};

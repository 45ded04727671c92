//! Error classes and their exit codes. Every failure is printed as one line,
//! `error[<class>]: <message>`.

use std::fmt;

use fleetassign_core::SolveError;
use fleetassign_distsim::DistError;
use fleetassign_dynamic::DynamicError;
use fleetassign_model::ModelError;
use fleetassign_oracle::OracleError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Usage,
    Io,
    Parse,
    Infeasible,
    Guard,
    NonConvergence,
    Validation,
}

impl ErrorClass {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorClass::Usage | ErrorClass::Io | ErrorClass::Validation => 1,
            ErrorClass::Parse => 2,
            ErrorClass::Infeasible => 3,
            ErrorClass::Guard => 4,
            ErrorClass::NonConvergence => 5,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ErrorClass::Usage => "usage",
            ErrorClass::Io => "io",
            ErrorClass::Parse => "parse",
            ErrorClass::Infeasible => "infeasible",
            ErrorClass::Guard => "guard",
            ErrorClass::NonConvergence => "nonconvergence",
            ErrorClass::Validation => "validation",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub class: ErrorClass,
    pub message: String,
}

impl CliError {
    pub fn new(class: ErrorClass, message: impl Into<String>) -> Self {
        Self {
            class,
            message: message.into(),
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Usage, message)
    }

    pub fn parse(message: impl Into<String>) -> Self {
        Self::new(ErrorClass::Parse, message)
    }

    /// Context such as a file name in front of the message.
    pub fn context(mut self, context: impl fmt::Display) -> Self {
        self.message = format!("{context}: {}", self.message);
        self
    }

    /// The single line printed to stderr.
    pub fn line(&self) -> String {
        format!("error[{}]: {}", self.class.name(), self.message.replace('\n', " "))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

impl std::error::Error for CliError {}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        Self::parse(e.to_string())
    }
}

impl From<SolveError> for CliError {
    fn from(e: SolveError) -> Self {
        let class = match e {
            SolveError::Infeasible(_) => ErrorClass::Infeasible,
            SolveError::Overflow(_) => ErrorClass::Guard,
            SolveError::NonConvergence { .. } => ErrorClass::NonConvergence,
            SolveError::Model(_) => ErrorClass::Parse,
            _ => ErrorClass::Usage,
        };
        Self::new(class, e.to_string())
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        let class = match e {
            OracleError::Limit(_) => ErrorClass::Guard,
            OracleError::Infeasible => ErrorClass::Infeasible,
            OracleError::Unsupported(_) => ErrorClass::Usage,
        };
        Self::new(class, e.to_string())
    }
}

impl From<DynamicError> for CliError {
    fn from(e: DynamicError) -> Self {
        match e {
            DynamicError::Solve(inner) => inner.into(),
            DynamicError::Model(inner) => inner.into(),
            DynamicError::InvalidScenario(_) => Self::parse(e.to_string()),
            DynamicError::GuardExceeded(_) => Self::new(ErrorClass::Guard, e.to_string()),
            DynamicError::ConstraintViolation(_) => Self::new(ErrorClass::Validation, e.to_string()),
            DynamicError::Unsupported(_) => Self::usage(e.to_string()),
        }
    }
}

impl From<DistError> for CliError {
    fn from(e: DistError) -> Self {
        match e {
            DistError::Solve(inner) => inner.into(),
            DistError::Model(inner) => inner.into(),
            DistError::Format(_) | DistError::InvalidTopology(_) => Self::parse(e.to_string()),
            DistError::NonConvergence { .. } => Self::new(ErrorClass::NonConvergence, e.to_string()),
            DistError::Disconnected
            | DistError::NodeCount { .. }
            | DistError::Precondition(_)
            | DistError::Unsupported(_) => Self::usage(e.to_string()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_and_prefix() {
        let e: CliError = SolveError::Infeasible("none".into()).into();
        assert_eq!(e.class.exit_code(), 3);
        assert_eq!(e.line(), "error[infeasible]: infeasible: none");
        let e: CliError = OracleError::Limit("big".into()).into();
        assert_eq!(e.class.exit_code(), 4);
        let e: CliError = DistError::NonConvergence {
            rounds: 9,
            conflicts: 1,
            unassigned: 0,
        }
        .into();
        assert_eq!(e.class.exit_code(), 5);
        assert_eq!(CliError::parse("a\nb").line(), "error[parse]: a b");
    }
}

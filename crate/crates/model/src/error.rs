use thiserror::Error;

/// A parse failure located at a 1-based line of the input text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("instance dimensions must be at least 1x1 (got {agents}x{tasks})")]
    EmptyDimension { agents: usize, tasks: usize },
    #[error("row {row} has {found} entries, expected {expected}")]
    RaggedRow { row: usize, found: usize, expected: usize },
    #[error("pair ({agent}, {task}) is outside a {agents}x{tasks} instance")]
    PairOutOfRange {
        agent: usize,
        task: usize,
        agents: usize,
        tasks: usize,
    },
    #[error("agent {0} appears in more than one pair")]
    DuplicateAgent(usize),
    #[error("task {0} appears in more than one pair")]
    DuplicateTask(usize),
    #[error("undefined objective on empty matching")]
    EmptyMatching,
    #[error("k = {k} is out of range for a matching of {size} pairs")]
    KOutOfRange { k: usize, size: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by task validation, analysis, and simulation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The precedence relation contains a cycle, so no topological order exists.
    #[error("graph contains a cycle")]
    CyclicGraph,
    /// An edge references a vertex id outside `0..n`.
    #[error("edge ({0}, {1}) references a missing vertex")]
    DanglingEdge(usize, usize),
    /// A vertex is its own predecessor.
    #[error("self-loop on vertex {0}")]
    SelfLoop(usize),
    /// The same ordered pair appears twice in the edge set.
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    /// A worst-case execution time below zero was supplied (only reachable
    /// through deserialization; the in-memory representation is unsigned).
    #[error("vertex {0} has negative wcet {1}")]
    NegativeWcet(usize, i64),
    /// Vertex ids in a serialized task are not exactly `0..n`.
    #[error("vertex ids are not dense 0..n-1")]
    InvalidVertexIds,
    /// An exhaustive search would exceed the caller-supplied work limit.
    #[error("exhaustive search exceeds limit {0}")]
    PathExplosion(u64),
    /// A path collection has more paths than the analysis admits.
    #[error("collection of {n} paths is too large for {m} processors")]
    CollectionTooLarge { n: usize, m: usize },
    /// No integer deadline exists in the requested open interval.
    #[error("no integer deadline exists in the open interval")]
    EmptyDeadlineInterval,
    /// The operation needs a relative deadline but the task has none assigned.
    #[error("task has no deadline assigned")]
    DeadlineRequired,
    /// A supply trace does not deliver exactly the promised budgets.
    #[error("supply trace does not match reservation: {0}")]
    SupplyBudgetMismatch(String),
    /// Malformed serialized input.
    #[error("invalid input: {0}")]
    Parse(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

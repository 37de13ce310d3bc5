//! Classical comparison runtimes: a built-in primal-dual path-following IPM
//! and an adapter around an external LP solver executable.

mod external;
mod ipm;

pub use external::{solve_external, ExternalConfig};
pub use ipm::{solve_internal_ipm, IpmConfig, DENSE_NES_MAX_ROWS};

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
    Unbounded,
    IterationLimit,
    Error,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    InternalIpm,
    External(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    /// Objective in the sense and offset of the original problem.
    pub objective: Option<f64>,
    pub iterations: u64,
    /// Seconds spent in the solve itself.
    pub wall_time_s: f64,
    pub solver: SolverKind,
    /// Seconds spent writing the instance for an external solver.
    pub serialization_time_s: Option<f64>,
    pub message: Option<String>,
    /// Captured output of an external solver.
    pub output: Option<String>,
}

impl SolveOutcome {
    pub(crate) fn failed(solver: SolverKind, message: impl Into<String>) -> SolveOutcome {
        SolveOutcome {
            status: SolveStatus::Error,
            objective: None,
            iterations: 0,
            wall_time_s: 0.0,
            solver,
            serialization_time_s: None,
            message: Some(message.into()),
            output: None,
        }
    }
}

//! Solver back ends: an external MILP solver driven through LP files and an
//! exhaustive reference search for small models.

use std::fmt;
use std::time::Duration;

use crate::error::Result;
use crate::model::MilpModel;

pub mod external;
pub mod reference;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStatus {
    Optimal,
    /// A solution was found but not proven optimal within the limits.
    Feasible,
    Infeasible,
    Timeout,
    Error,
}

impl SolveStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::Timeout => "timeout",
            SolveStatus::Error => "error",
        }
    }

    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// An improving solution reported while the solver was running.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Incumbent {
    pub time: Duration,
    pub objective: f64,
}

/// Result of a solve. `values` (one per model variable, in declaration
/// order) is present exactly when the status has a solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment {
    pub status: SolveStatus,
    pub objective: Option<f64>,
    pub values: Option<Vec<f64>>,
    pub message: Option<String>,
    pub incumbents: Vec<Incumbent>,
    pub wall_time: Duration,
}

impl Assignment {
    pub fn without_solution(
        status: SolveStatus,
        message: impl Into<String>,
        wall_time: Duration,
    ) -> Self {
        Self {
            status,
            objective: None,
            values: None,
            message: Some(message.into()),
            incumbents: Vec::new(),
            wall_time,
        }
    }

    pub fn value(&self, model: &MilpModel, name: &str) -> Option<f64> {
        Some(self.values.as_ref()?[model.var(name)?])
    }
}

/// Anything that can solve a model. Implementations must be usable from
/// several threads at once.
pub trait MilpSolver: Sync {
    fn solve(&self, model: &MilpModel) -> Assignment;

    fn describe(&self) -> String;
}

/// Convenience wrapper turning an error into an `Error` assignment.
pub(crate) fn or_error(result: Result<Assignment>, wall_time: Duration) -> Assignment {
    result.unwrap_or_else(|e| {
        Assignment::without_solution(SolveStatus::Error, e.to_string(), wall_time)
    })
}

use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::tree::{plan_cost, JoinTree};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlanStatus {
    Ok,
    Timeout,
    Infeasible,
    Error,
}

impl PlanStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanStatus::Ok => "ok",
            PlanStatus::Timeout => "timeout",
            PlanStatus::Infeasible => "infeasible",
            PlanStatus::Error => "error",
        }
    }
}

impl fmt::Display for PlanStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlanStatus {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ok" => Ok(PlanStatus::Ok),
            "timeout" => Ok(PlanStatus::Timeout),
            "infeasible" => Ok(PlanStatus::Infeasible),
            "error" => Ok(PlanStatus::Error),
            other => Err(format!("unknown plan status '{other}'")),
        }
    }
}

/// Outcome of one optimizer run. `tree` and `cost` are present exactly when
/// the status is [`PlanStatus::Ok`], and `cost` is always the exact C_out of
/// `tree`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub algorithm: String,
    pub tree: Option<JoinTree>,
    pub cost: Option<f64>,
    pub wall_time: Duration,
    pub status: PlanStatus,
    /// Free-form remarks (fallbacks taken, solver statuses, ...).
    pub notes: Vec<String>,
}

impl PlanResult {
    /// A successful result; the cost is recomputed from the tree.
    pub fn ok(
        algorithm: impl Into<String>,
        graph: &QueryGraph,
        tree: JoinTree,
        wall_time: Duration,
    ) -> Result<Self> {
        let cost = plan_cost(graph, &tree)?;
        Ok(Self {
            algorithm: algorithm.into(),
            tree: Some(tree),
            cost: Some(cost),
            wall_time,
            status: PlanStatus::Ok,
            notes: Vec::new(),
        })
    }

    pub fn failed(
        algorithm: impl Into<String>,
        status: PlanStatus,
        wall_time: Duration,
        note: impl Into<String>,
    ) -> Self {
        debug_assert!(status != PlanStatus::Ok);
        Self {
            algorithm: algorithm.into(),
            tree: None,
            cost: None,
            wall_time,
            status,
            notes: vec![note.into()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_ok(&self) -> bool {
        self.status == PlanStatus::Ok
    }

    /// Cost of a successful plan, or an error describing why there is none.
    pub fn require_cost(&self) -> Result<f64> {
        self.cost.ok_or_else(|| {
            Error::InvalidArgument(format!(
                "{} produced no plan (status {}: {})",
                self.algorithm,
                self.status,
                self.notes.join("; ")
            ))
        })
    }
}

/// An optional point in time after which long-running algorithms give up.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Deadline(Option<Instant>);

impl Deadline {
    pub const NONE: Deadline = Deadline(None);

    pub fn after(d: Duration) -> Self {
        Deadline(Instant::now().checked_add(d))
    }

    pub fn at(t: Instant) -> Self {
        Deadline(Some(t))
    }

    pub fn expired(&self) -> bool {
        self.0.is_some_and(|t| Instant::now() >= t)
    }

    pub fn remaining(&self) -> Option<Duration> {
        self.0.map(|t| t.saturating_duration_since(Instant::now()))
    }

    pub fn instant(&self) -> Option<Instant> {
        self.0
    }
}

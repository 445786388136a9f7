//! Query graphs, join trees and the C_out cost model, together with the
//! classical join-ordering algorithms used as baselines and as building
//! blocks of the hybrid MILP optimizer.
//!
//! Everything in this crate is pure: graphs and trees are immutable once
//! built and every algorithm is a function of its inputs (plus an explicit
//! seed for the randomized ones).

pub mod error;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod heuristics;
pub mod io;
pub mod plan;
pub mod relset;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{Predicate, QueryGraph, RelId, Relation};
pub use plan::{Deadline, PlanResult, PlanStatus};
pub use relset::RelSet;
pub use tree::{JoinTree, TreeViolation};

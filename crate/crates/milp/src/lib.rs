//! Join ordering as a mixed integer linear program over join-tree templates.
//!
//! A [`JoinTemplate`] fixes the slots a plan may occupy, [`encode`] turns a
//! query graph and a template into a [`MilpModel`], a [`MilpSolver`] solves
//! it and [`decode`] reads the assignment back as a (partial) join tree.
//! [`hybrid_milp`] combines all of this with the adaptive heuristic.

pub mod decode;
pub mod encode;
pub mod error;
pub mod hybrid;
pub mod lp;
pub mod model;
pub mod solver;
pub mod template;
pub mod thresholds;

pub use decode::{decode, PartialPlan, PlanNode};
pub use encode::{assignment_for_tree, encode, encode_with, EncodeOptions, Weighting};
pub use error::{Family, MilpError, Result};
pub use hybrid::{
    depth_model, derive_part_problems, hybrid_milp, hybrid_milp_with, hybrid_thresholds, stitch,
    HybridOptions, PartProblem,
};
pub use lp::{emit_lp, objective_scale, MAX_OBJECTIVE_COEFFICIENT};
pub use model::{Constraint, MilpModel, Sense, VarKind, Variable};
pub use solver::{
    external::{find_cbc, SolutionDialect, SolverConfig},
    reference::{enumerate_feasible, solve_reference, ReferenceSolver},
    Assignment, Incumbent, MilpSolver, SolveStatus,
};
pub use template::{AnchorSpec, JoinSlot, JoinTemplate};
pub use thresholds::{derive_thresholds, Thresholds};

use std::collections::BTreeMap;
use std::thread;
use std::time::Instant;

use joinopt_core::heuristics::{adaptive, ikkbz, linearized_dp, LinearOrder};
use joinopt_core::tree::{plan_cost, validate_tree};
use joinopt_core::{JoinTree, PlanResult, QueryGraph, RelId};

use crate::decode::{decode, PartialPlan, PlanNode};
use crate::encode::encode;
use crate::error::{MilpError, Result};
use crate::model::MilpModel;
use crate::solver::MilpSolver;
use crate::template::{AnchorSpec, JoinTemplate};
use crate::thresholds::{derive_thresholds, Thresholds};

pub const ALGORITHM: &str = "hybrid";

/// The join-ordering problem left open at one anchor slot. Relation `i` of
/// `graph` is relation `relations[i]` of the parent graph.
#[derive(Debug, Clone, PartialEq)]
pub struct PartProblem {
    pub slot: usize,
    pub graph: QueryGraph,
    pub relations: Vec<RelId>,
}

impl PartProblem {
    /// A tree over the part's relations expressed in parent ids.
    pub fn lift(&self, local: &JoinTree) -> JoinTree {
        local.map_leaves(&|r| self.relations[r])
    }
}

/// One induced subgraph per anchor group, in slot order.
pub fn derive_part_problems(graph: &QueryGraph, partial: &PartialPlan) -> Result<Vec<PartProblem>> {
    partial
        .anchor_groups
        .iter()
        .map(|(&slot, &set)| {
            let (g, relations) = graph.induced_subgraph(set)?;
            Ok(PartProblem {
                slot,
                graph: g,
                relations,
            })
        })
        .collect()
}

/// Replaces every anchor group of `partial` by its sub-solution, which must
/// join exactly the group's relations.
pub fn stitch(
    partial: &PartialPlan,
    sub_solutions: &BTreeMap<usize, JoinTree>,
) -> Result<JoinTree> {
    for slot in sub_solutions.keys() {
        if !partial.anchor_groups.contains_key(slot) {
            return Err(MilpError::InvalidArgument(format!(
                "no anchor group at slot {slot}"
            )));
        }
    }
    fn conv(n: &PlanNode, p: &PartialPlan, subs: &BTreeMap<usize, JoinTree>) -> Result<JoinTree> {
        Ok(match n {
            PlanNode::Relation(r) => JoinTree::leaf(*r),
            PlanNode::Join(a, b) => JoinTree::join(conv(a, p, subs)?, conv(b, p, subs)?),
            PlanNode::AnchorGroup(slot) => {
                let sub = subs.get(slot).ok_or_else(|| {
                    MilpError::InvalidArgument(format!("no sub-solution for anchor slot {slot}"))
                })?;
                let leaves = sub.leaves();
                let group = p.anchor_groups[slot];
                if leaves.len() != group.len() || joinopt_core::RelSet::from_iter(leaves) != group {
                    return Err(MilpError::InvalidArgument(format!(
                        "sub-solution for anchor slot {slot} does not join exactly its group"
                    )));
                }
                sub.clone()
            }
        })
    }
    conv(&partial.root, partial, sub_solutions)
}

/// Orders a part problem with the adaptive heuristic. Disconnected parts are
/// ordered per component, the components concatenated smallest result first,
/// and the whole order handed to the interval DP.
pub fn solve_part(graph: &QueryGraph) -> Result<JoinTree> {
    if graph.n_relations() == 1 {
        return Ok(JoinTree::leaf(0));
    }
    if graph.is_connected() {
        let plan = adaptive(graph)?;
        return plan.tree.ok_or_else(|| {
            MilpError::Solver(format!("adaptive failed: {}", plan.notes.join("; ")))
        });
    }
    let mut components: Vec<(f64, Vec<RelId>)> = Vec::new();
    for set in graph.components() {
        let order = if set.len() == 1 {
            set.iter().collect()
        } else {
            let (sub, map) = graph.induced_subgraph(set)?;
            let res = ikkbz(&sub)?;
            let order = res
                .order
                .ok_or_else(|| MilpError::Solver("ikkbz failed on a component".into()))?;
            order.as_slice().iter().map(|&r| map[r]).collect()
        };
        components.push((graph.intermediate_cardinality(set)?, order));
    }
    components.sort_by(|a, b| a.0.total_cmp(&b.0));
    let order: Vec<RelId> = components.into_iter().flat_map(|(_, o)| o).collect();
    let plan = linearized_dp(graph, &LinearOrder::new(graph, order)?)?;
    plan.tree
        .ok_or_else(|| MilpError::Solver("interval DP produced no plan".into()))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridOptions {
    pub depths: Vec<usize>,
    pub threshold_count: usize,
    /// Anchor capacity; defaults to the joins left after the anchor's path.
    pub p_max: Option<usize>,
    /// Solve the depth configurations on separate threads.
    pub concurrent: bool,
}

impl Default for HybridOptions {
    fn default() -> Self {
        Self {
            depths: vec![4, 5, 6, 7],
            threshold_count: 5,
            p_max: None,
            concurrent: true,
        }
    }
}

pub fn hybrid_milp(
    graph: &QueryGraph,
    depths: &[usize],
    solver: &dyn MilpSolver,
) -> Result<PlanResult> {
    let options = HybridOptions {
        depths: depths.to_vec(),
        ..HybridOptions::default()
    };
    hybrid_milp_with(graph, &options, solver)
}

/// Adaptive plan, thresholds from its cost, one two-anchor template model per
/// depth, anchors completed by the adaptive heuristic, and the cheapest of
/// all stitched plans and the adaptive plan.
pub fn hybrid_milp_with(
    graph: &QueryGraph,
    options: &HybridOptions,
    solver: &dyn MilpSolver,
) -> Result<PlanResult> {
    let start = Instant::now();
    if options.depths.is_empty() {
        return Err(MilpError::InvalidArgument(
            "at least one template depth is required".into(),
        ));
    }
    if options.depths.iter().any(|&d| d < 2) {
        return Err(MilpError::InvalidArgument(
            "two-anchor templates need depth at least 2".into(),
        ));
    }
    let n = graph.n_relations();
    if n == 2 {
        let tree = JoinTree::join(JoinTree::leaf(0), JoinTree::leaf(1));
        return Ok(PlanResult::ok(ALGORITHM, graph, tree, start.elapsed())?
            .with_note("two relations: no model built"));
    }

    let base = adaptive(graph)?;
    let (Some(base_tree), Some(base_cost)) = (base.tree.clone(), base.cost) else {
        let mut failed = base;
        failed.algorithm = ALGORITHM.into();
        failed.wall_time = start.elapsed();
        return Ok(failed.with_note("adaptive reference plan failed"));
    };
    let thresholds =
        derive_thresholds(base_cost.max(f64::MIN_POSITIVE), options.threshold_count)?.at_least(1.0);

    let run = |depth: usize| run_depth(graph, depth, &thresholds, options.p_max, solver);
    let outcomes: Vec<(usize, DepthOutcome)> = if options.concurrent && options.depths.len() > 1 {
        thread::scope(|s| {
            let handles: Vec<_> = options
                .depths
                .iter()
                .map(|&d| (d, s.spawn(move || run(d))))
                .collect();
            handles
                .into_iter()
                .map(|(d, h)| {
                    (
                        d,
                        h.join()
                            .unwrap_or_else(|_| Err("configuration panicked".into())),
                    )
                })
                .collect()
        })
    } else {
        options.depths.iter().map(|&d| (d, run(d))).collect()
    };

    let mut notes = Vec::new();
    let mut best = (base_cost, base_tree, None);
    let mut contributed = false;
    for (depth, outcome) in outcomes {
        match outcome {
            Ok((tree, note)) => {
                contributed = true;
                let cost = plan_cost(graph, &tree)?;
                notes.push(format!("depth {depth}: {note}, stitched cost {cost}"));
                if cost < best.0 {
                    best = (cost, tree, Some(depth));
                }
            }
            Err(note) => notes.push(format!("depth {depth}: {note}")),
        }
    }
    if !contributed {
        notes.push("MILP contributed nothing; returning the adaptive plan".into());
    }
    notes.push(match best.2 {
        Some(d) => format!("selected the depth {d} plan"),
        None => "selected the adaptive plan".into(),
    });
    let mut result = PlanResult::ok(ALGORITHM, graph, best.1, start.elapsed())?;
    result.notes = notes;
    Ok(result)
}

/// Thresholds the hybrid method derives for `graph`: `count` powers of two
/// ending above the adaptive cost, without levels below 1.
pub fn hybrid_thresholds(graph: &QueryGraph, count: usize) -> Result<Thresholds> {
    let base = adaptive(graph)?;
    let cost = base
        .cost
        .ok_or_else(|| MilpError::Solver("adaptive reference plan failed".into()))?;
    Ok(derive_thresholds(cost.max(f64::MIN_POSITIVE), count)?.at_least(1.0))
}

/// The two-anchor template of `depth` and its model. `p_max` defaults to
/// the joins left after the anchor's path.
pub fn depth_model(
    graph: &QueryGraph,
    depth: usize,
    thresholds: &Thresholds,
    p_max: Option<usize>,
) -> Result<(JoinTemplate, MilpModel)> {
    let p_max = p_max.unwrap_or_else(|| (graph.n_relations() - 1).saturating_sub(depth));
    let template = JoinTemplate::build(depth, AnchorSpec::TwoHalfAnchors, p_max)?;
    let model = encode(graph, &template, thresholds)?;
    Ok((template, model))
}

type DepthOutcome = std::result::Result<(JoinTree, String), String>;

fn run_depth(
    graph: &QueryGraph,
    depth: usize,
    thresholds: &Thresholds,
    p_max: Option<usize>,
    solver: &dyn MilpSolver,
) -> DepthOutcome {
    let (template, model) =
        depth_model(graph, depth, thresholds, p_max).map_err(|e| e.to_string())?;
    let assignment = solver.solve(&model);
    let status = assignment.status;
    let Some(values) = assignment.values.as_ref().filter(|_| status.has_solution()) else {
        let why = assignment.message.unwrap_or_default();
        return Err(format!("{status} ({})", why.lines().next().unwrap_or("")));
    };
    let partial = decode(graph, &template, &model, values).map_err(|e| e.to_string())?;
    let mut subs = BTreeMap::new();
    for part in derive_part_problems(graph, &partial).map_err(|e| e.to_string())? {
        let local = solve_part(&part.graph).map_err(|e| e.to_string())?;
        subs.insert(part.slot, part.lift(&local));
    }
    let tree = stitch(&partial, &subs).map_err(|e| e.to_string())?;
    if !validate_tree(graph, &tree).is_empty() {
        return Err("stitched plan is not a valid join tree".into());
    }
    let objective = assignment
        .objective
        .map_or("n/a".to_string(), |o| o.to_string());
    Ok((tree, format!("{status}, objective {objective}")))
}

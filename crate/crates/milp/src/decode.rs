use std::collections::BTreeMap;

use joinopt_core::{JoinTree, QueryGraph, RelId, RelSet};

use crate::encode::{ja, nap, roj};
use crate::error::{Family, MilpError, Result};
use crate::model::MilpModel;
use crate::template::JoinTemplate;

/// Tolerance used when re-checking constraints on rounded assignments.
pub const VERIFY_TOLERANCE: f64 = 1e-9;

/// A node of a plan whose anchor slots may still hold unordered groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanNode {
    Relation(RelId),
    /// The relations the anchor slot absorbed; see [`PartialPlan::anchor_groups`].
    AnchorGroup(usize),
    Join(Box<PlanNode>, Box<PlanNode>),
}

impl PlanNode {
    fn join(a: PlanNode, b: PlanNode) -> Self {
        PlanNode::Join(Box::new(a), Box::new(b))
    }
}

/// The upper part of a join tree as chosen by the model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialPlan {
    pub root: PlanNode,
    /// Anchor slot → relations its subtree must join (at least three).
    pub anchor_groups: BTreeMap<usize, RelSet>,
}

impl PartialPlan {
    pub fn is_complete(&self) -> bool {
        self.anchor_groups.is_empty()
    }

    /// The plan as a join tree, if no anchor group is left open.
    pub fn to_tree(&self) -> Option<JoinTree> {
        fn conv(n: &PlanNode) -> Option<JoinTree> {
            match n {
                PlanNode::Relation(r) => Some(JoinTree::leaf(*r)),
                PlanNode::AnchorGroup(_) => None,
                PlanNode::Join(a, b) => Some(JoinTree::join(conv(a)?, conv(b)?)),
            }
        }
        conv(&self.root)
    }

    /// All relations covered, whether as leaves or inside anchor groups.
    pub fn relations(&self) -> RelSet {
        fn walk(n: &PlanNode, groups: &BTreeMap<usize, RelSet>) -> RelSet {
            match n {
                PlanNode::Relation(r) => RelSet::single(*r),
                PlanNode::AnchorGroup(s) => groups.get(s).copied().unwrap_or(RelSet::EMPTY),
                PlanNode::Join(a, b) => walk(a, groups).union(walk(b, groups)),
            }
        }
        walk(&self.root, &self.anchor_groups)
    }
}

/// Re-checks `values` against every constraint of `model` and reads the
/// active slots back as a plan. Each active slot joins its active child slots
/// (in template order) and then its remaining operands in ascending order.
pub fn decode(
    graph: &QueryGraph,
    template: &JoinTemplate,
    model: &MilpModel,
    values: &[f64],
) -> Result<PartialPlan> {
    let values = model.round_values(values, 1e-6)?;
    if let Some(c) = model.first_violation(&values, VERIFY_TOLERANCE) {
        return Err(MilpError::DecodeInfeasible {
            family: Family::of_constraint(&c.name).unwrap_or(Family::A),
            constraint: c.name.clone(),
        });
    }
    let get = |name: String| model.value(&values, &name);
    let n_rel = graph.n_relations();
    let mut sets = vec![RelSet::EMPTY; template.len()];
    let mut active = vec![false; template.len()];
    for s in 0..template.len() {
        active[s] = get(ja(s))? > 0.5;
        for r in 0..n_rel {
            if get(roj(r, s))? > 0.5 {
                sets[s] = sets[s].with(r);
            }
        }
    }
    if !active[template.root()] {
        return Err(MilpError::DecodeInfeasible {
            family: Family::B,
            constraint: ja(template.root()),
        });
    }

    let mut groups = BTreeMap::new();
    let root = build(template, template.root(), &sets, &active, &get, &mut groups)?;
    let plan = PartialPlan {
        root,
        anchor_groups: groups,
    };
    if plan.relations() != graph.all() {
        return Err(MilpError::DecodeInfeasible {
            family: Family::C,
            constraint: format!("C_{}", template.root()),
        });
    }
    Ok(plan)
}

fn build(
    template: &JoinTemplate,
    s: usize,
    sets: &[RelSet],
    active: &[bool],
    get: &dyn Fn(String) -> Result<f64>,
    groups: &mut BTreeMap<usize, RelSet>,
) -> Result<PlanNode> {
    let shape_error = || MilpError::DecodeInfeasible {
        family: Family::C,
        constraint: format!("C_{s}"),
    };
    if template.is_anchor(s) && get(nap(s))? > 0.5 {
        groups.insert(s, sets[s]);
        return Ok(PlanNode::AnchorGroup(s));
    }
    let mut pieces = Vec::new();
    let mut covered = RelSet::EMPTY;
    for &c in template.children(s) {
        if active[c] {
            covered = covered.union(sets[c]);
            pieces.push(build(template, c, sets, active, get, groups)?);
        }
    }
    pieces.extend(sets[s].minus(covered).iter().map(PlanNode::Relation));
    if pieces.len() != 2 {
        return Err(shape_error());
    }
    let b = pieces.pop().unwrap();
    let a = pieces.pop().unwrap();
    Ok(PlanNode::join(a, b))
}

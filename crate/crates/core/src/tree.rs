//! Join trees and the C_out cost function.

use std::fmt;

use crate::error::{Error, Result};
use crate::graph::{QueryGraph, RelId};
use crate::relset::RelSet;

/// A binary join tree over base relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum JoinTree {
    Leaf(RelId),
    Join(Box<JoinTree>, Box<JoinTree>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    UnknownRelation(RelId),
    DuplicateLeaf(RelId),
    MissingRelation(RelId),
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::UnknownRelation(r) => write!(f, "leaf references unknown relation {r}"),
            TreeViolation::DuplicateLeaf(r) => write!(f, "relation {r} appears more than once"),
            TreeViolation::MissingRelation(r) => write!(f, "relation {r} missing"),
        }
    }
}

impl JoinTree {
    pub fn leaf(rel: RelId) -> Self {
        JoinTree::Leaf(rel)
    }

    pub fn join(left: JoinTree, right: JoinTree) -> Self {
        JoinTree::Join(Box::new(left), Box::new(right))
    }

    /// Left-deep tree joining `order` from left to right.
    pub fn left_deep(order: &[RelId]) -> Option<Self> {
        let (&first, rest) = order.split_first()?;
        Some(rest.iter().fold(JoinTree::Leaf(first), |acc, &r| {
            JoinTree::join(acc, JoinTree::Leaf(r))
        }))
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, JoinTree::Leaf(_))
    }

    /// Relations below this node. Leaves must be valid `RelSet` members.
    pub fn relset(&self) -> RelSet {
        match self {
            JoinTree::Leaf(r) => RelSet::single(*r),
            JoinTree::Join(l, r) => l.relset().union(r.relset()),
        }
    }

    /// Leaves in left-to-right order.
    pub fn leaves(&self) -> Vec<RelId> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<RelId>) {
        match self {
            JoinTree::Leaf(r) => out.push(*r),
            JoinTree::Join(l, r) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    pub fn n_joins(&self) -> usize {
        match self {
            JoinTree::Leaf(_) => 0,
            JoinTree::Join(l, r) => 1 + l.n_joins() + r.n_joins(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            JoinTree::Leaf(_) => 0,
            JoinTree::Join(l, r) => 1 + l.depth().max(r.depth()),
        }
    }

    /// Every join's right operand is a base relation.
    pub fn is_left_deep(&self) -> bool {
        match self {
            JoinTree::Leaf(_) => true,
            JoinTree::Join(l, r) => r.is_leaf() && l.is_left_deep(),
        }
    }

    /// Leaf sets of all internal nodes in post-order (the root comes last).
    pub fn join_sets(&self) -> Vec<RelSet> {
        let mut out = Vec::new();
        self.collect_join_sets(&mut out);
        out
    }

    fn collect_join_sets(&self, out: &mut Vec<RelSet>) -> RelSet {
        match self {
            JoinTree::Leaf(r) => RelSet::single(*r),
            JoinTree::Join(l, r) => {
                let s = l.collect_join_sets(out).union(r.collect_join_sets(out));
                out.push(s);
                s
            }
        }
    }

    /// Renames every leaf through `map` (used to lift subproblem solutions
    /// back into their parent graph).
    pub fn map_leaves(&self, map: &impl Fn(RelId) -> RelId) -> JoinTree {
        match self {
            JoinTree::Leaf(r) => JoinTree::Leaf(map(*r)),
            JoinTree::Join(l, r) => JoinTree::join(l.map_leaves(map), r.map_leaves(map)),
        }
    }

    /// Renders the tree using relation names, e.g. `((A ⋈ B) ⋈ C)`.
    pub fn display<'a>(&'a self, graph: &'a QueryGraph) -> impl fmt::Display + 'a {
        Named { tree: self, graph }
    }
}

struct Named<'a> {
    tree: &'a JoinTree,
    graph: &'a QueryGraph,
}

impl fmt::Display for Named<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.tree {
            JoinTree::Leaf(r) => match self.graph.relations().get(*r) {
                Some(rel) => f.write_str(&rel.name),
                None => write!(f, "?{r}"),
            },
            JoinTree::Join(l, r) => write!(
                f,
                "({} ⋈ {})",
                Named {
                    tree: l,
                    graph: self.graph
                },
                Named {
                    tree: r,
                    graph: self.graph
                }
            ),
        }
    }
}

impl fmt::Display for JoinTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            JoinTree::Leaf(r) => write!(f, "{r}"),
            JoinTree::Join(l, r) => write!(f, "({l} ⋈ {r})"),
        }
    }
}

/// Checks that every relation of `graph` appears exactly once as a leaf.
/// Returns the list of violations; empty means the tree is valid.
pub fn validate_tree(graph: &QueryGraph, tree: &JoinTree) -> Vec<TreeViolation> {
    let n = graph.n_relations();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for r in tree.leaves() {
        if r >= n {
            out.push(TreeViolation::UnknownRelation(r));
        } else if seen[r] {
            if !out.contains(&TreeViolation::DuplicateLeaf(r)) {
                out.push(TreeViolation::DuplicateLeaf(r));
            }
        } else {
            seen[r] = true;
        }
    }
    out.extend(
        seen.iter()
            .enumerate()
            .filter(|(_, &s)| !s)
            .map(|(r, _)| TreeViolation::MissingRelation(r)),
    );
    out
}

/// C_out cost of `tree`: the summed output cardinalities of all joins except
/// the root, whose output is identical for every plan.
pub fn plan_cost(graph: &QueryGraph, tree: &JoinTree) -> Result<f64> {
    let violations = validate_tree(graph, tree);
    if !violations.is_empty() {
        return Err(Error::InvalidTree(violations));
    }
    Ok(cost_unchecked(graph, tree))
}

pub(crate) fn cost_unchecked(graph: &QueryGraph, tree: &JoinTree) -> f64 {
    let mut sets = tree.join_sets();
    sets.pop();
    sets.into_iter().map(|s| graph.card(s)).sum()
}

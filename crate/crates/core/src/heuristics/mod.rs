//! Polynomial and randomized join-ordering algorithms.

mod genetic;
mod goo;
mod ikkbz;
mod linearized;
mod minsel;
mod quickpick;

pub use genetic::{genetic, genetic_with_history, GeneticBudget, GeneticConfig, GeneticRun};
pub use goo::{goo, goo_dp};
pub use ikkbz::{adaptive, ikkbz, IkkbzResult};
pub use linearized::linearized_dp;
pub use minsel::minsel;
pub use quickpick::{quickpick, quickpick_until};

use crate::error::{Error, Result};
use crate::graph::{QueryGraph, RelId};

/// A permutation of a query's relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearOrder(Vec<RelId>);

impl LinearOrder {
    /// Checks that `order` is a permutation of `0..graph.n_relations()`.
    pub fn new(graph: &QueryGraph, order: Vec<RelId>) -> Result<Self> {
        let n = graph.n_relations();
        let mut seen = vec![false; n];
        if order.len() != n {
            return Err(Error::InvalidArgument(format!(
                "order has {} entries for {n} relations",
                order.len()
            )));
        }
        for &r in &order {
            if r >= n || std::mem::replace(&mut seen[r], true) {
                return Err(Error::InvalidArgument(format!(
                    "order {order:?} is not a permutation of 0..{n}"
                )));
            }
        }
        Ok(Self(order))
    }

    pub fn as_slice(&self) -> &[RelId] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<RelId> {
        self.0
    }
}

/// Candidate edges for edge-driven tree construction: every predicate, plus
/// cross-product edges between the lowest members of every pair of
/// connected components when the graph is disconnected.
pub(crate) fn edge_pool(graph: &QueryGraph) -> Vec<(RelId, RelId)> {
    let mut edges: Vec<(RelId, RelId)> = graph
        .predicates()
        .iter()
        .map(|p| (p.rel_a, p.rel_b))
        .collect();
    let reps: Vec<RelId> = graph
        .components()
        .iter()
        .map(|c| c.first().unwrap())
        .collect();
    for (i, &a) in reps.iter().enumerate() {
        for &b in &reps[i + 1..] {
            edges.push((a, b));
        }
    }
    edges
}

/// Builds a join tree by walking `sequence` (indices into `edges`) and
/// merging the components containing each edge's endpoints. The edge pool
/// must connect all relations.
pub(crate) fn tree_from_edge_sequence(
    n: usize,
    edges: &[(RelId, RelId)],
    sequence: impl IntoIterator<Item = usize>,
) -> crate::tree::JoinTree {
    use crate::tree::JoinTree;
    let mut parent: Vec<usize> = (0..n).collect();
    let mut trees: Vec<Option<JoinTree>> = (0..n).map(|r| Some(JoinTree::Leaf(r))).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut remaining = n - 1;
    for e in sequence {
        if remaining == 0 {
            break;
        }
        let (a, b) = edges[e];
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            continue;
        }
        let merged = JoinTree::join(trees[ra].take().unwrap(), trees[rb].take().unwrap());
        parent[rb] = ra;
        trees[ra] = Some(merged);
        remaining -= 1;
    }
    assert_eq!(remaining, 0, "edge pool does not connect all relations");
    let root = find(&mut parent, 0);
    trees[root].take().unwrap()
}

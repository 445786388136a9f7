use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::plan::PlanResult;
use crate::relset::RelSet;
use crate::tree::JoinTree;

/// Greedy left-deep ordering by minimal selectivity.
///
/// Starts with the most selective predicate (ties: lowest `(a, b)`) and then
/// repeatedly appends the relation attached to the current prefix by the
/// most selective predicate (ties: lowest relation id). When no predicate
/// leaves the prefix, the smallest remaining relation is cross-joined.
pub fn minsel(graph: &QueryGraph) -> Result<PlanResult> {
    let start = Instant::now();
    let n = graph.n_relations();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "minsel needs at least 2 relations".into(),
        ));
    }
    let smallest = |rest: RelSet| {
        rest.iter()
            .min_by(|&a, &b| {
                graph
                    .cardinality(a)
                    .total_cmp(&graph.cardinality(b))
                    .then(a.cmp(&b))
            })
            .unwrap()
    };

    let mut order = match graph.predicates().iter().min_by(|p, q| {
        p.selectivity
            .total_cmp(&q.selectivity)
            .then((p.rel_a, p.rel_b).cmp(&(q.rel_a, q.rel_b)))
    }) {
        Some(p) => vec![p.rel_a, p.rel_b],
        None => vec![smallest(graph.all())],
    };
    let mut prefix = RelSet::from_iter(order.iter().copied());

    while order.len() < n {
        let next = graph
            .predicates()
            .iter()
            .filter(|p| prefix.contains(p.rel_a) != prefix.contains(p.rel_b))
            .map(|p| {
                let outside = if prefix.contains(p.rel_a) {
                    p.rel_b
                } else {
                    p.rel_a
                };
                (p.selectivity, outside)
            })
            .min_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)))
            .map(|(_, r)| r)
            .unwrap_or_else(|| smallest(graph.all().minus(prefix)));
        order.push(next);
        prefix = prefix.with(next);
    }
    PlanResult::ok(
        "minsel",
        graph,
        JoinTree::left_deep(&order).unwrap(),
        start.elapsed(),
    )
}

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{edge_pool, tree_from_edge_sequence};
use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::plan::{Deadline, PlanResult, PlanStatus};
use crate::tree::cost_unchecked;

pub fn quickpick(graph: &QueryGraph, trials: usize, seed: u64) -> Result<PlanResult> {
    quickpick_until(graph, trials, seed, Deadline::NONE)
}

/// Best of `trials` random trees, each built by visiting the query's edges in
/// uniformly random order and joining the two partial plans an edge connects.
pub fn quickpick_until(
    graph: &QueryGraph,
    trials: usize,
    seed: u64,
    deadline: Deadline,
) -> Result<PlanResult> {
    const NAME: &str = "quickpick";
    let start = Instant::now();
    if trials == 0 {
        return Err(Error::InvalidArgument(
            "quickpick needs at least one trial".into(),
        ));
    }
    if graph.n_relations() < 2 {
        return Err(Error::InvalidArgument(
            "quickpick needs at least 2 relations".into(),
        ));
    }
    let edges = edge_pool(graph);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sequence: Vec<usize> = (0..edges.len()).collect();
    let mut best = None;
    for _ in 0..trials {
        if deadline.expired() {
            return Ok(PlanResult::failed(
                NAME,
                PlanStatus::Timeout,
                start.elapsed(),
                "deadline reached",
            ));
        }
        sequence.shuffle(&mut rng);
        let tree = tree_from_edge_sequence(graph.n_relations(), &edges, sequence.iter().copied());
        let cost = cost_unchecked(graph, &tree);
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, tree));
        }
    }
    let (_, tree) = best.unwrap();
    PlanResult::ok(NAME, graph, tree, start.elapsed())
}

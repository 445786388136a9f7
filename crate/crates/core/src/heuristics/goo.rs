use std::time::Instant;

use super::{linearized_dp, LinearOrder};
use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::plan::PlanResult;
use crate::relset::RelSet;
use crate::tree::JoinTree;

/// Greedy operator ordering: repeatedly join the two partial plans with the
/// smallest output. Pairs connected by a predicate are preferred; cross
/// products happen only once no connected pair is left. Ties go to the pair
/// with the lowest `(min id, min id)`.
pub fn goo(graph: &QueryGraph) -> Result<PlanResult> {
    let start = Instant::now();
    if graph.n_relations() < 2 {
        return Err(Error::InvalidArgument(
            "goo needs at least 2 relations".into(),
        ));
    }
    // Kept sorted by lowest member.
    let mut forest: Vec<(RelSet, JoinTree, f64)> = (0..graph.n_relations())
        .map(|r| (RelSet::single(r), JoinTree::Leaf(r), graph.cardinality(r)))
        .collect();

    while forest.len() > 1 {
        let mut pick: Option<(usize, usize, f64)> = None;
        let mut connected = false;
        for i in 0..forest.len() {
            for j in i + 1..forest.len() {
                let joinable = graph.joinable(forest[i].0, forest[j].0);
                if connected && !joinable {
                    continue;
                }
                let out =
                    forest[i].2 * forest[j].2 * graph.cross_selectivity(forest[i].0, forest[j].0);
                let take = match pick {
                    None => true,
                    Some(_) if joinable && !connected => true,
                    Some((_, _, best)) => out < best,
                };
                if take {
                    pick = Some((i, j, out));
                    connected |= joinable;
                }
            }
        }
        let (i, j, out) = pick.unwrap();
        let (sj, tj, _) = forest.remove(j);
        let (si, ti, _) =
            std::mem::replace(&mut forest[i], (RelSet::EMPTY, JoinTree::Leaf(0), 0.0));
        forest[i] = (si.union(sj), JoinTree::join(ti, tj), out);
    }
    let (_, tree, _) = forest.pop().unwrap();
    PlanResult::ok("goo", graph, tree, start.elapsed())
}

/// GOO refined by interval DP over the GOO tree's leaf order.
pub fn goo_dp(graph: &QueryGraph) -> Result<PlanResult> {
    let start = Instant::now();
    let base = goo(graph)?;
    let leaves = base
        .tree
        .as_ref()
        .expect("goo always yields a tree")
        .leaves();
    let mut plan = linearized_dp(graph, &LinearOrder::new(graph, leaves)?)?;
    plan.algorithm = "goo-dp".into();
    plan.wall_time = start.elapsed();
    Ok(plan)
}

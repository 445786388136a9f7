//! IKKBZ for C_out and the adaptive linearized-DP refinement.
//!
//! For a fixed root the precedence tree is normalized bottom-up: children
//! chains are merged by ascending rank `(T - 1) / C`, and a node whose rank
//! exceeds that of its successor is fused with it into a compound module.
//! Every relation is tried as root and the cheapest left-deep plan wins.

use std::time::Instant;

use super::{linearized_dp, LinearOrder};
use crate::error::Result;
use crate::graph::{QueryGraph, RelId};
use crate::plan::{PlanResult, PlanStatus};
use crate::tree::{cost_unchecked, JoinTree};

#[derive(Debug, Clone, PartialEq)]
pub struct IkkbzResult {
    /// Present whenever `plan` is ok.
    pub order: Option<LinearOrder>,
    pub plan: PlanResult,
}

#[derive(Debug, Clone)]
struct Module {
    rels: Vec<RelId>,
    t: f64,
    c: f64,
}

impl Module {
    fn rank(&self) -> f64 {
        (self.t - 1.0) / self.c
    }

    fn absorb(&mut self, next: Module) {
        self.c += self.t * next.c;
        self.t *= next.t;
        self.rels.extend(next.rels);
    }
}

/// Adjacency of the tree actually used for ordering: the graph itself when it
/// is acyclic, otherwise a minimum spanning tree under weight `log(f)`.
fn ordering_tree(graph: &QueryGraph) -> (Vec<Vec<(RelId, f64)>>, bool) {
    let n = graph.n_relations();
    let mut adj = vec![Vec::new(); n];
    let mut preds: Vec<_> = graph.predicates().iter().enumerate().collect();
    let spanning = !graph.is_acyclic();
    if spanning {
        preds.sort_by(|(i, a), (j, b)| a.selectivity.total_cmp(&b.selectivity).then(i.cmp(j)));
    }
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (_, p) in preds {
        let (a, b) = (find(&mut parent, p.rel_a), find(&mut parent, p.rel_b));
        if a == b {
            continue;
        }
        parent[a] = b;
        adj[p.rel_a].push((p.rel_b, p.selectivity));
        adj[p.rel_b].push((p.rel_a, p.selectivity));
    }
    for l in &mut adj {
        l.sort_by_key(|&(r, _)| r);
    }
    (adj, spanning)
}

fn merge_by_rank(chains: Vec<Vec<Module>>) -> Vec<Module> {
    let mut out: Vec<Module> = Vec::new();
    let mut heads: Vec<std::iter::Peekable<std::vec::IntoIter<Module>>> = chains
        .into_iter()
        .map(|c| c.into_iter().peekable())
        .collect();
    loop {
        let mut pick: Option<(usize, f64)> = None;
        for (i, h) in heads.iter_mut().enumerate() {
            if let Some(m) = h.peek() {
                let r = m.rank();
                if pick.is_none_or(|(_, best)| r < best) {
                    pick = Some((i, r));
                }
            }
        }
        match pick {
            Some((i, _)) => out.push(heads[i].next().unwrap()),
            None => return out,
        }
    }
}

fn normalized_chain(
    graph: &QueryGraph,
    adj: &[Vec<(RelId, f64)>],
    node: RelId,
    parent: RelId,
    sel_to_parent: f64,
) -> Vec<Module> {
    let children: Vec<Vec<Module>> = adj[node]
        .iter()
        .filter(|&&(c, _)| c != parent)
        .map(|&(c, f)| normalized_chain(graph, adj, c, node, f))
        .collect();
    let mut rest = merge_by_rank(children).into_iter().peekable();
    let t = graph.cardinality(node) * sel_to_parent;
    let mut head = Module {
        rels: vec![node],
        t,
        c: t,
    };
    while rest.peek().is_some_and(|m| m.rank() < head.rank()) {
        head.absorb(rest.next().unwrap());
    }
    std::iter::once(head).chain(rest).collect()
}

fn order_for_root(graph: &QueryGraph, adj: &[Vec<(RelId, f64)>], root: RelId) -> Vec<RelId> {
    let children: Vec<Vec<Module>> = adj[root]
        .iter()
        .map(|&(c, f)| normalized_chain(graph, adj, c, root, f))
        .collect();
    std::iter::once(root)
        .chain(merge_by_rank(children).into_iter().flat_map(|m| m.rels))
        .collect()
}

/// Optimal cross-product-free left-deep plan for an acyclic query graph.
pub fn ikkbz(graph: &QueryGraph) -> Result<IkkbzResult> {
    const NAME: &str = "ikkbz";
    let start = Instant::now();
    if !graph.is_connected() {
        return Ok(IkkbzResult {
            order: None,
            plan: PlanResult::failed(
                NAME,
                PlanStatus::Infeasible,
                start.elapsed(),
                "query graph is disconnected",
            ),
        });
    }
    let (adj, spanning) = ordering_tree(graph);
    let mut best: Option<(f64, Vec<RelId>)> = None;
    for root in 0..graph.n_relations() {
        let order = order_for_root(graph, &adj, root);
        let cost = cost_unchecked(graph, &JoinTree::left_deep(&order).unwrap());
        if best.as_ref().is_none_or(|(c, _)| cost < *c) {
            best = Some((cost, order));
        }
    }
    let (_, order) = best.expect("graph has at least one relation");
    let tree = JoinTree::left_deep(&order).unwrap();
    let mut plan = PlanResult::ok(NAME, graph, tree, start.elapsed())?;
    if spanning {
        plan = plan.with_note("cyclic query graph: ordered on a minimum spanning tree");
    }
    Ok(IkkbzResult {
        order: Some(LinearOrder::new(graph, order)?),
        plan,
    })
}

/// IKKBZ followed by interval DP over the resulting linear order.
pub fn adaptive(graph: &QueryGraph) -> Result<PlanResult> {
    const NAME: &str = "adaptive";
    let start = Instant::now();
    let base = ikkbz(graph)?;
    let Some(order) = base.order else {
        let mut failed = base.plan;
        failed.algorithm = NAME.into();
        failed.wall_time = start.elapsed();
        return Ok(failed);
    };
    let mut plan = linearized_dp(graph, &order)?;
    plan.algorithm = NAME.into();
    plan.wall_time = start.elapsed();
    plan.notes.extend(base.plan.notes);
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::g0;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    /// Cheapest cross-product-free left-deep order, by enumeration.
    fn left_deep_oracle(graph: &QueryGraph) -> f64 {
        fn rec(g: &QueryGraph, prefix: &mut Vec<usize>, used: u128, best: &mut f64) {
            let n = g.n_relations();
            if prefix.len() == n {
                let c = cost_unchecked(g, &JoinTree::left_deep(prefix).unwrap());
                *best = best.min(c);
                return;
            }
            for r in 0..n {
                if used & (1 << r) != 0 {
                    continue;
                }
                if !prefix.is_empty() && !prefix.iter().any(|&p| g.selectivity(p, r).is_some()) {
                    continue;
                }
                prefix.push(r);
                rec(g, prefix, used | (1 << r), best);
                prefix.pop();
            }
        }
        let mut best = f64::INFINITY;
        rec(graph, &mut Vec::new(), 0, &mut best);
        best
    }

    #[test]
    fn g0_order_and_cost() {
        let r = ikkbz(&g0()).unwrap();
        assert!(close(r.plan.cost.unwrap(), 110.0));
        assert!(close(r.plan.cost.unwrap(), left_deep_oracle(&g0())));
        assert!(r.plan.tree.unwrap().is_left_deep());
    }

    #[test]
    fn two_relations() {
        let g = QueryGraph::from_parts(&[3.0, 4.0], &[(0, 1, 0.5)]).unwrap();
        let r = ikkbz(&g).unwrap();
        assert_eq!(r.plan.cost, Some(0.0));
        assert_eq!(adaptive(&g).unwrap().cost, Some(0.0));
    }

    #[test]
    fn single_relation_adaptive() {
        let g = QueryGraph::from_parts(&[3.0], &[]).unwrap();
        let r = adaptive(&g).unwrap();
        assert_eq!(r.cost, Some(0.0));
        assert_eq!(r.tree, Some(JoinTree::Leaf(0)));
    }

    #[test]
    fn matches_left_deep_enumeration_on_random_trees() {
        use crate::generate::{generate_tree_query, GeneratorParams};
        for seed in 0..60 {
            let n = 4 + (seed as usize % 5);
            let g = generate_tree_query(&GeneratorParams::new(n, 1000 + seed)).unwrap();
            let got = ikkbz(&g).unwrap().plan.cost.unwrap();
            let want = left_deep_oracle(&g);
            assert!(
                close(got, want),
                "seed {seed}: ikkbz {got} vs oracle {want}"
            );
        }
    }

    #[test]
    fn cyclic_graph_uses_spanning_tree() {
        let g = QueryGraph::from_parts(
            &[100.0, 200.0, 300.0],
            &[(0, 1, 0.1), (1, 2, 0.01), (0, 2, 0.5)],
        )
        .unwrap();
        let r = ikkbz(&g).unwrap();
        assert!(r.plan.is_ok());
        assert!(r.plan.notes.iter().any(|n| n.contains("spanning tree")));
        assert_eq!(
            r.plan.cost,
            Some(cost_unchecked(&g, r.plan.tree.as_ref().unwrap()))
        );
    }

    #[test]
    fn disconnected_is_infeasible() {
        let g = QueryGraph::from_parts(&[2.0; 4], &[(0, 1, 0.5), (2, 3, 0.5)]).unwrap();
        assert_eq!(ikkbz(&g).unwrap().plan.status, PlanStatus::Infeasible);
        assert_eq!(adaptive(&g).unwrap().status, PlanStatus::Infeasible);
    }

    #[test]
    fn adaptive_on_g0() {
        let r = adaptive(&g0()).unwrap();
        assert!(close(r.cost.unwrap(), 110.0));
        assert_eq!(r.algorithm, "adaptive");
    }
}

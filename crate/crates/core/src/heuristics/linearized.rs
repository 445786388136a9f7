use std::time::Instant;

use super::LinearOrder;
use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::plan::PlanResult;
use crate::tree::JoinTree;

/// Optimal bushy tree whose left-to-right leaf sequence is `order`.
///
/// Interval DP: the best plan for positions `i..=j` splits once at some `k`
/// into the best plans for `i..=k` and `k+1..=j`. Cross products inside an
/// interval are allowed. Ties go to the lowest split position.
pub fn linearized_dp(graph: &QueryGraph, order: &LinearOrder) -> Result<PlanResult> {
    let start = Instant::now();
    let order = order.as_slice();
    let n = order.len();
    if n != graph.n_relations() {
        return Err(Error::InvalidArgument(format!(
            "order covers {n} relations, graph has {}",
            graph.n_relations()
        )));
    }

    let mut sel = vec![vec![1.0f64; n]; n];
    for p in graph.predicates() {
        sel[p.rel_a][p.rel_b] = p.selectivity;
        sel[p.rel_b][p.rel_a] = p.selectivity;
    }
    // card[i][j]: output of joining positions i..=j.
    let mut card = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let mut acc = 1.0;
        for j in i..n {
            acc *= graph.cardinality(order[j]);
            for k in i..j {
                acc *= sel[order[k]][order[j]];
            }
            card[i][j] = acc;
        }
    }

    let mut best = vec![vec![0.0f64; n]; n];
    let mut split = vec![vec![0usize; n]; n];
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len - 1;
            let mut b = f64::INFINITY;
            let mut at = i;
            for k in i..j {
                let c = best[i][k] + best[k + 1][j];
                if c < b {
                    b = c;
                    at = k;
                }
            }
            best[i][j] = b + card[i][j];
            split[i][j] = at;
        }
    }

    fn build(order: &[usize], split: &[Vec<usize>], i: usize, j: usize) -> JoinTree {
        if i == j {
            return JoinTree::Leaf(order[i]);
        }
        let k = split[i][j];
        JoinTree::join(build(order, split, i, k), build(order, split, k + 1, j))
    }
    let tree = build(order, &split, 0, n - 1);
    PlanResult::ok("linearized-dp", graph, tree, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::brute_force_optimal;
    use crate::graph::fixtures::g0;
    use crate::tree::plan_cost;

    fn order(g: &QueryGraph, o: &[usize]) -> LinearOrder {
        LinearOrder::new(g, o.to_vec()).unwrap()
    }

    #[test]
    fn g0_identity_order() {
        let g = g0();
        let r = linearized_dp(&g, &order(&g, &[0, 1, 2, 3])).unwrap();
        assert!((r.cost.unwrap() - 110.0).abs() < 1e-9);
    }

    #[test]
    fn three_relations_pick_cheaper_of_two_shapes() {
        let g =
            QueryGraph::from_parts(&[10.0, 500.0, 20.0], &[(0, 1, 0.5), (1, 2, 0.001)]).unwrap();
        let o = [0, 1, 2];
        let l = JoinTree::leaf;
        let a = plan_cost(&g, &JoinTree::join(JoinTree::join(l(0), l(1)), l(2))).unwrap();
        let b = plan_cost(&g, &JoinTree::join(l(0), JoinTree::join(l(1), l(2)))).unwrap();
        let r = linearized_dp(&g, &order(&g, &o)).unwrap();
        assert_eq!(r.cost.unwrap(), a.min(b));
        assert!(b < a, "instance should prefer the right-nested shape");
    }

    #[test]
    fn balanced_optimum_is_found_along_its_order() {
        // Two cheap pairs (0,1) and (2,3) linked by an expensive bridge.
        let g = QueryGraph::from_parts(
            &[1000.0, 1000.0, 1000.0, 1000.0],
            &[(0, 1, 0.0001), (1, 2, 0.9), (2, 3, 0.0001)],
        )
        .unwrap();
        let best = brute_force_optimal(&g, true).unwrap();
        let t = best.tree.as_ref().unwrap();
        assert_eq!(t.join_sets().len(), 3);
        assert!(!t.is_left_deep());
        let r = linearized_dp(&g, &order(&g, &t.leaves())).unwrap();
        assert_eq!(r.cost, best.cost);
    }

    #[test]
    fn rejects_foreign_orders() {
        let g = g0();
        assert!(LinearOrder::new(&g, vec![0, 1, 2]).is_err());
        assert!(LinearOrder::new(&g, vec![0, 1, 1, 3]).is_err());
        assert!(LinearOrder::new(&g, vec![0, 1, 2, 4]).is_err());
    }
}

#![allow(dead_code)]

use joinopt_core::tree::plan_cost;
use joinopt_core::{JoinTree, QueryGraph};

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Cheapest left-deep order whose every prefix extension applies a predicate.
pub fn left_deep_nocross_optimum(g: &QueryGraph) -> f64 {
    fn rec(g: &QueryGraph, prefix: &mut Vec<usize>, best: &mut f64) {
        let n = g.n_relations();
        if prefix.len() == n {
            *best = best.min(plan_cost(g, &JoinTree::left_deep(prefix).unwrap()).unwrap());
            return;
        }
        for r in 0..n {
            if prefix.contains(&r) {
                continue;
            }
            if !prefix.is_empty() && !prefix.iter().any(|&p| g.selectivity(p, r).is_some()) {
                continue;
            }
            prefix.push(r);
            rec(g, prefix, best);
            prefix.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(g, &mut Vec::new(), &mut best);
    best
}

/// Every binary tree whose leaves read `seq` from left to right.
pub fn trees_over_sequence(seq: &[usize]) -> Vec<JoinTree> {
    if seq.len() == 1 {
        return vec![JoinTree::leaf(seq[0])];
    }
    let mut out = Vec::new();
    for k in 1..seq.len() {
        for l in trees_over_sequence(&seq[..k]) {
            for r in trees_over_sequence(&seq[k..]) {
                out.push(JoinTree::join(l.clone(), r));
            }
        }
    }
    out
}

/// Root-inclusive sum over all joins, computed independently of plan_cost.
pub fn cost_with_root(g: &QueryGraph, t: &JoinTree) -> f64 {
    match t {
        JoinTree::Leaf(_) => 0.0,
        JoinTree::Join(l, r) => {
            cost_with_root(g, l)
                + cost_with_root(g, r)
                + g.intermediate_cardinality(t.relset()).unwrap()
        }
    }
}

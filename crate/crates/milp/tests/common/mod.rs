#![allow(dead_code)]

use joinopt_core::{JoinTree, QueryGraph};
use joinopt_milp::{JoinSlot, JoinTemplate, MilpModel};

/// Chain A-B-C-D.
pub fn chain4(cards: [f64; 4], sels: [f64; 3]) -> QueryGraph {
    QueryGraph::named(
        &["A", "B", "C", "D"],
        &cards,
        &[(0, 1, sels[0]), (1, 2, sels[1]), (2, 3, sels[2])],
    )
    .unwrap()
}

pub const I: usize = 0;
pub const J: usize = 1;
pub const K: usize = 2;
pub const L: usize = 3;

/// Root i with children j and k; l below j.
pub fn fig1_template() -> JoinTemplate {
    JoinTemplate::new(
        vec![
            JoinSlot::new(I, vec![J, K]),
            JoinSlot::new(J, vec![L]),
            JoinSlot::new(K, vec![]),
            JoinSlot::new(L, vec![]),
        ],
        I,
    )
    .unwrap()
}

/// Sets the named variables, applies every predicate whose relations are
/// both operands, and raises exactly the threshold indicators that the
/// threshold rows force.
pub fn complete(model: &MilpModel, graph: &QueryGraph, fixed: &[(String, f64)]) -> Vec<f64> {
    let mut v = vec![0.0; model.n_variables()];
    for (name, x) in fixed {
        v[model
            .var(name)
            .unwrap_or_else(|| panic!("no variable {name}"))] = *x;
    }
    for name in model.variables().iter().map(|x| x.name.clone()) {
        if let Some(rest) = name.strip_prefix("pao_") {
            let (p, s) = rest.split_once('_').unwrap();
            let pred = &graph.predicates()[p.parse::<usize>().unwrap()];
            let on = |r: usize| v[model.var(&format!("roj_{r}_{s}")).unwrap()] > 0.5;
            if on(pred.rel_a) && on(pred.rel_b) {
                v[model.var(&name).unwrap()] = 1.0;
            }
        }
    }
    for c in model.constraints() {
        if c.name.starts_with("H_") && !c.is_satisfied(&v, 1e-9) {
            let (_, rest) = c.name.split_once('_').unwrap();
            v[model.var(&format!("trj_{rest}")).unwrap()] = 1.0;
        }
    }
    v
}

pub fn slot_vars(slot: usize, rels: &[usize]) -> Vec<(String, f64)> {
    let mut out = vec![(format!("ja_{slot}"), 1.0)];
    out.extend(rels.iter().map(|r| (format!("roj_{r}_{slot}"), 1.0)));
    out
}

/// Canonical text of an unordered tree: children sorted by their text.
pub fn canonical(t: &JoinTree) -> String {
    match t {
        JoinTree::Leaf(r) => r.to_string(),
        JoinTree::Join(a, b) => {
            let (mut x, mut y) = (canonical(a), canonical(b));
            if x > y {
                std::mem::swap(&mut x, &mut y);
            }
            format!("({x} {y})")
        }
    }
}

/// Every unordered binary tree over `rels`, canonicalized.
pub fn all_unordered_trees(rels: &[usize]) -> Vec<String> {
    fn rec(rels: &[usize]) -> Vec<JoinTree> {
        if rels.len() == 1 {
            return vec![JoinTree::leaf(rels[0])];
        }
        let mut out = Vec::new();
        let first = rels[0];
        let rest = &rels[1..];
        // the side holding the first relation is enumerated once per split
        for mask in 0..(1u32 << rest.len()) - 1 {
            let mut left = vec![first];
            let mut right = Vec::new();
            for (i, &r) in rest.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    left.push(r);
                } else {
                    right.push(r);
                }
            }
            for l in rec(&left) {
                for r in rec(&right) {
                    out.push(JoinTree::join(l.clone(), r));
                }
            }
        }
        out
    }
    let mut v: Vec<String> = rec(rels).iter().map(canonical).collect();
    v.sort();
    v.dedup();
    v
}

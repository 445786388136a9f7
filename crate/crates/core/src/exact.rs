//! Exact join ordering: exhaustive subset dynamic programming (optionally
//! admitting cross products) and DPSize.
//!
//! Both search the same recurrence, `cost(S) = cost(L) + cost(R) + |S|`,
//! with the root term included; since the root output is identical for every
//! plan this does not change the argmin, and the reported cost is recomputed
//! from the final tree with the root excluded. Splits are compared on
//! `cost(L) + cost(R)` alone, as a huge `|S|` would absorb the difference. Both also use the same
//! tie-break (prefer the split whose numerically smaller side is lowest), so
//! whenever their search spaces agree they return the same tree.

use std::collections::HashMap;
use std::time::Instant;

use crate::error::{Error, Result};
use crate::graph::QueryGraph;
use crate::plan::{Deadline, PlanResult, PlanStatus};
use crate::relset::RelSet;
use crate::tree::JoinTree;

/// Largest instance the exhaustive oracle accepts (O(3^R) work).
pub const BRUTE_FORCE_MAX_RELATIONS: usize = 16;

#[derive(Clone, Copy)]
struct Best {
    cost: f64,
    /// `cost` without the set's own output; what splits are ranked by.
    inner: f64,
    /// Numerically smaller side of the chosen split; empty for leaves.
    left: RelSet,
}

/// Entry for joining `a` and `b` (ordered so that `a < b`) into a set with
/// output `card`.
#[inline]
fn combine(cost_a: f64, cost_b: f64, card: f64, left: RelSet) -> Best {
    let inner = cost_a + cost_b;
    Best {
        cost: inner + card,
        inner,
        left,
    }
}

#[inline]
fn better(cand: &Best, incumbent: Option<&Best>) -> bool {
    match incumbent {
        None => true,
        Some(b) => cand.inner < b.inner || (cand.inner == b.inner && cand.left < b.left),
    }
}

fn rebuild(table: &impl Fn(RelSet) -> Best, set: RelSet) -> JoinTree {
    if set.len() == 1 {
        return JoinTree::Leaf(set.first().unwrap());
    }
    let left = table(set).left;
    JoinTree::join(rebuild(table, left), rebuild(table, set.minus(left)))
}

pub fn brute_force_optimal(graph: &QueryGraph, allow_cross: bool) -> Result<PlanResult> {
    brute_force_optimal_until(graph, allow_cross, Deadline::NONE)
}

/// Optimal bushy plan over every tree (with `allow_cross`) or over trees
/// whose joins all apply at least one predicate.
pub fn brute_force_optimal_until(
    graph: &QueryGraph,
    allow_cross: bool,
    deadline: Deadline,
) -> Result<PlanResult> {
    let name = if allow_cross {
        "brute-force"
    } else {
        "brute-force-nocross"
    };
    let n = graph.n_relations();
    if n > BRUTE_FORCE_MAX_RELATIONS {
        return Err(Error::TooLarge {
            algorithm: "brute_force_optimal",
            relations: n,
            limit: BRUTE_FORCE_MAX_RELATIONS,
        });
    }
    let start = Instant::now();
    if n == 1 {
        return PlanResult::ok(name, graph, JoinTree::Leaf(0), start.elapsed());
    }
    if !allow_cross && !graph.is_connected() {
        return Ok(PlanResult::failed(
            name,
            PlanStatus::Infeasible,
            start.elapsed(),
            "query graph is disconnected and cross products are disallowed",
        ));
    }

    let full: u32 = ((1u64 << n) - 1) as u32;
    let mut table: Vec<Option<Best>> = vec![None; full as usize + 1];
    for r in 0..n {
        table[1 << r] = Some(Best {
            cost: 0.0,
            inner: 0.0,
            left: RelSet::EMPTY,
        });
    }

    for s in 1..=full {
        if s.count_ones() < 2 {
            continue;
        }
        if s & 0x3ff == 0 && deadline.expired() {
            return Ok(PlanResult::failed(
                name,
                PlanStatus::Timeout,
                start.elapsed(),
                "deadline reached",
            ));
        }
        let set = RelSet(s as u128);
        if !allow_cross && !graph.is_connected_set(set) {
            continue;
        }
        let card = graph.card(set);
        let mut best: Option<Best> = None;
        let mut sub = (s - 1) & s;
        while sub != 0 {
            let other = s ^ sub;
            if sub < other {
                if let (Some(a), Some(b)) = (table[sub as usize], table[other as usize]) {
                    let (ls, rs) = (RelSet(sub as u128), RelSet(other as u128));
                    if allow_cross || graph.joinable(ls, rs) {
                        let cand = combine(a.cost, b.cost, card, ls);
                        if better(&cand, best.as_ref()) {
                            best = Some(cand);
                        }
                    }
                }
            }
            sub = (sub - 1) & s;
        }
        table[s as usize] = best;
    }

    if table[full as usize].is_none() {
        return Ok(PlanResult::failed(
            name,
            PlanStatus::Infeasible,
            start.elapsed(),
            "no plan found",
        ));
    }
    let tree = rebuild(
        &|set: RelSet| table[set.0 as usize].unwrap(),
        RelSet(full as u128),
    );
    PlanResult::ok(name, graph, tree, start.elapsed())
}

pub fn dpsize(graph: &QueryGraph) -> Result<PlanResult> {
    dpsize_until(graph, Deadline::NONE)
}

/// DPSize: optimal bushy plans without cross products, built by increasing
/// plan size from pairs of smaller connected plans.
pub fn dpsize_until(graph: &QueryGraph, deadline: Deadline) -> Result<PlanResult> {
    const NAME: &str = "dpsize";
    let start = Instant::now();
    let n = graph.n_relations();
    if !graph.is_connected() {
        return Ok(PlanResult::failed(
            NAME,
            PlanStatus::Infeasible,
            start.elapsed(),
            "query graph is disconnected",
        ));
    }
    if n == 1 {
        return PlanResult::ok(NAME, graph, JoinTree::Leaf(0), start.elapsed());
    }

    let mut table: HashMap<RelSet, Best> = HashMap::new();
    let mut by_size: Vec<Vec<RelSet>> = vec![Vec::new(); n + 1];
    for r in 0..n {
        let s = RelSet::single(r);
        table.insert(
            s,
            Best {
                cost: 0.0,
                inner: 0.0,
                left: RelSet::EMPTY,
            },
        );
        by_size[1].push(s);
    }

    let mut ticks = 0u32;
    for size in 2..=n {
        let mut found: HashMap<RelSet, Best> = HashMap::new();
        for k in 1..=size / 2 {
            for &a in &by_size[k] {
                for &b in &by_size[size - k] {
                    ticks = ticks.wrapping_add(1);
                    if ticks & 0xfff == 0 && deadline.expired() {
                        return Ok(PlanResult::failed(
                            NAME,
                            PlanStatus::Timeout,
                            start.elapsed(),
                            "deadline reached",
                        ));
                    }
                    if k == size - k && b <= a {
                        continue;
                    }
                    if !a.is_disjoint(b) || !graph.joinable(a, b) {
                        continue;
                    }
                    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                    let set = lo.union(hi);
                    let cand = combine(table[&lo].cost, table[&hi].cost, graph.card(set), lo);
                    if better(&cand, found.get(&set)) {
                        found.insert(set, cand);
                    }
                }
            }
        }
        let mut sets: Vec<RelSet> = found.keys().copied().collect();
        sets.sort_unstable();
        by_size[size] = sets;
        table.extend(found);
    }

    let tree = rebuild(&|s: RelSet| table[&s], graph.all());
    PlanResult::ok(NAME, graph, tree, start.elapsed())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::g0;
    use crate::tree::plan_cost;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9 * b.abs().max(1.0)
    }

    #[test]
    fn g0_optimum_with_cross_products() {
        let r = brute_force_optimal(&g0(), true).unwrap();
        assert!(close(r.cost.unwrap(), 110.0));
        // ((A⋈B)⋈D)⋈C ties with ((A⋈B)⋈C)⋈D: both intermediates are 10 and 100.
        let shown = r.tree.unwrap().to_string();
        assert!(
            ["(((0 ⋈ 1) ⋈ 2) ⋈ 3)", "(2 ⋈ ((0 ⋈ 1) ⋈ 3))"].contains(&shown.as_str()),
            "{shown}"
        );
    }

    #[test]
    fn g0_dpsize_matches_oracle() {
        let d = dpsize(&g0()).unwrap();
        let b = brute_force_optimal(&g0(), false).unwrap();
        assert_eq!(d.cost, b.cost);
        assert_eq!(d.tree, b.tree);
        assert!(close(d.cost.unwrap(), 110.0));
    }

    #[test]
    fn two_relations_cost_zero() {
        let g = QueryGraph::from_parts(&[50.0, 70.0], &[(0, 1, 0.1)]).unwrap();
        assert_eq!(brute_force_optimal(&g, true).unwrap().cost, Some(0.0));
        assert_eq!(dpsize(&g).unwrap().cost, Some(0.0));
    }

    #[test]
    fn chain_of_three_matches_enumeration() {
        let g = QueryGraph::from_parts(&[20.0, 300.0, 5.0], &[(0, 1, 0.05), (1, 2, 0.2)]).unwrap();
        // The three cross-product-free trees differ only in the first join.
        let l = JoinTree::leaf;
        let candidates = [
            JoinTree::join(JoinTree::join(l(0), l(1)), l(2)),
            JoinTree::join(JoinTree::join(l(1), l(2)), l(0)),
        ];
        let best = candidates
            .iter()
            .map(|t| plan_cost(&g, t).unwrap())
            .fold(f64::INFINITY, f64::min);
        assert!(close(dpsize(&g).unwrap().cost.unwrap(), best));
    }

    #[test]
    fn star_optimum_is_left_deep() {
        let g = QueryGraph::from_parts(
            &[1000.0, 10.0, 20.0, 30.0],
            &[(0, 1, 0.01), (0, 2, 0.2), (0, 3, 0.05)],
        )
        .unwrap();
        let d = dpsize(&g).unwrap();
        let b = brute_force_optimal(&g, false).unwrap();
        assert_eq!(d.cost, b.cost);
        // The hub must sit below every join, i.e. the tree is linear.
        let t = d.tree.unwrap();
        let linear = |t: &JoinTree| match t {
            JoinTree::Join(l, r) => l.is_leaf() || r.is_leaf(),
            _ => true,
        };
        assert!(t.join_sets().len() == 3 && linear(&t));
    }

    #[test]
    fn disconnected_graph_without_cross_products_is_infeasible() {
        let g = QueryGraph::from_parts(&[2.0; 4], &[(0, 1, 0.5), (2, 3, 0.5)]).unwrap();
        assert_eq!(dpsize(&g).unwrap().status, PlanStatus::Infeasible);
        assert_eq!(
            brute_force_optimal(&g, false).unwrap().status,
            PlanStatus::Infeasible
        );
        assert!(brute_force_optimal(&g, true).unwrap().is_ok());
    }

    #[test]
    fn size_guard() {
        let g = QueryGraph::from_parts(&[2.0; 17], &[]).unwrap();
        assert!(matches!(
            brute_force_optimal(&g, true),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn expired_deadline_times_out() {
        let cards = [10.0; 14];
        let preds: Vec<_> = (1..14).map(|i| (0, i, 0.5)).collect();
        let g = QueryGraph::from_parts(&cards, &preds).unwrap();
        let past = Deadline::at(Instant::now());
        assert_eq!(dpsize_until(&g, past).unwrap().status, PlanStatus::Timeout);
        assert_eq!(
            brute_force_optimal_until(&g, true, past).unwrap().status,
            PlanStatus::Timeout
        );
    }
}

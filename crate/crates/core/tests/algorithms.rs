mod common;

use common::{close, left_deep_nocross_optimum, trees_over_sequence};
use joinopt_core::exact::{brute_force_optimal, dpsize};
use joinopt_core::generate::{generate_tree_query, GeneratorParams};
use joinopt_core::heuristics::{
    adaptive, genetic, goo, goo_dp, ikkbz, linearized_dp, minsel, quickpick, GeneticBudget,
    LinearOrder,
};
use joinopt_core::tree::{plan_cost, validate_tree};
use joinopt_core::{PlanResult, QueryGraph};

fn query(n: usize, seed: u64) -> QueryGraph {
    generate_tree_query(&GeneratorParams::new(n, seed)).unwrap()
}

fn assert_valid(g: &QueryGraph, r: &PlanResult) {
    assert!(r.is_ok(), "{} failed: {:?}", r.algorithm, r.notes);
    let t = r.tree.as_ref().unwrap();
    assert!(
        validate_tree(g, t).is_empty(),
        "{} produced an invalid tree",
        r.algorithm
    );
    assert_eq!(r.cost.unwrap(), plan_cost(g, t).unwrap());
}

#[test]
fn every_heuristic_returns_valid_trees() {
    for i in 0..200u64 {
        let n = 5 + (i as usize % 16);
        let g = query(n, 50_000 + i);
        let results = [
            ikkbz(&g).unwrap().plan,
            adaptive(&g).unwrap(),
            goo(&g).unwrap(),
            goo_dp(&g).unwrap(),
            minsel(&g).unwrap(),
            quickpick(&g, 50, i).unwrap(),
            genetic(&g, GeneticBudget::Generations(5), i).unwrap(),
            dpsize(&g).unwrap(),
        ];
        for r in &results {
            assert_valid(&g, r);
        }
    }
}

#[test]
fn dpsize_matches_exhaustive_nocross_oracle() {
    for i in 0..80u64 {
        let n = 2 + (i as usize % 9);
        let g = query(n, 7_000 + i);
        let d = dpsize(&g).unwrap();
        let b = brute_force_optimal(&g, false).unwrap();
        let x = brute_force_optimal(&g, true).unwrap();
        assert_eq!(d.cost, b.cost, "seed {i}");
        assert!(x.cost.unwrap() <= d.cost.unwrap());
    }
}

#[test]
fn dpsize_matches_oracle_on_cyclic_graphs() {
    let g = QueryGraph::from_parts(
        &[120.0, 4000.0, 35.0, 900.0, 77.0, 10.0],
        &[
            (0, 1, 0.01),
            (1, 2, 0.2),
            (2, 0, 0.5),
            (2, 3, 0.001),
            (3, 4, 0.3),
            (4, 5, 0.9),
            (5, 1, 0.05),
        ],
    )
    .unwrap();
    assert_eq!(
        dpsize(&g).unwrap().cost,
        brute_force_optimal(&g, false).unwrap().cost
    );
}

#[test]
fn ikkbz_is_left_deep_optimal_up_to_nine_relations() {
    for i in 0..60u64 {
        let n = 3 + (i as usize % 7);
        let g = query(n, 90_000 + i);
        let got = ikkbz(&g).unwrap().plan.cost.unwrap();
        let want = left_deep_nocross_optimum(&g);
        assert!(close(got, want, 1e-9), "seed {i}: {got} vs {want}");
    }
}

#[test]
fn dominance_and_lower_bounds() {
    for i in 0..40u64 {
        let n = 4 + (i as usize % 7);
        let g = query(n, 31_000 + i);
        let opt = brute_force_optimal(&g, true).unwrap().cost.unwrap();
        let ik = ikkbz(&g).unwrap().plan.cost.unwrap();
        let ad = adaptive(&g).unwrap().cost.unwrap();
        assert!(ad <= ik * (1.0 + 1e-12));
        let go = goo(&g).unwrap().cost.unwrap();
        assert!(goo_dp(&g).unwrap().cost.unwrap() <= go * (1.0 + 1e-12));
        assert!(quickpick(&g, 100, i).unwrap().cost.unwrap() >= opt * (1.0 - 1e-12));
        let ge = genetic(&g, GeneticBudget::Generations(10), i)
            .unwrap()
            .cost
            .unwrap();
        assert!(ge >= opt * (1.0 - 1e-12));
        for c in [ik, ad, go] {
            assert!(c >= opt * (1.0 - 1e-12));
        }
    }
}

#[test]
fn linearized_dp_equals_enumeration_over_fixed_order() {
    for i in 0..30u64 {
        let n = 3 + (i as usize % 6);
        let g = query(n, 12_000 + i);
        let mut order: Vec<usize> = (0..n).collect();
        order.rotate_left(i as usize % n);
        if i % 2 == 1 {
            order.reverse();
        }
        let want = trees_over_sequence(&order)
            .iter()
            .map(|t| plan_cost(&g, t).unwrap())
            .fold(f64::INFINITY, f64::min);
        let got = linearized_dp(&g, &LinearOrder::new(&g, order).unwrap())
            .unwrap()
            .cost
            .unwrap();
        assert!(close(got, want, 1e-12), "seed {i}: {got} vs {want}");
    }
}

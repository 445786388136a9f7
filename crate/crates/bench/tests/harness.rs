use std::time::Duration;

use joinopt_bench::{run_benchmark, BenchConfig, BenchError, BenchReport, Query};
use joinopt_core::generate::{generate_tree_query, GeneratorParams};
use joinopt_core::PlanStatus;

fn queries(n: usize, count: usize, seed: u64) -> Vec<Query> {
    (0..count)
        .map(|i| {
            let g = generate_tree_query(&GeneratorParams::new(n, seed + i as u64)).unwrap();
            Query::new(format!("q{i}"), g)
        })
        .collect()
}

fn config(timeout: Duration) -> BenchConfig {
    BenchConfig {
        timeout,
        quickpick_trials: 50,
        ..BenchConfig::default()
    }
}

#[test]
fn every_pair_gets_a_row_in_order() {
    let qs = queries(6, 5, 1);
    let report = run_benchmark(
        &qs,
        &["dpsize", "goo", "quickpick"],
        &config(Duration::from_secs(10)),
    )
    .unwrap();
    assert_eq!(report.rows.len(), 15);
    for (i, row) in report.rows.iter().enumerate() {
        assert_eq!(row.query_id, format!("q{}", i / 3));
        assert_eq!(row.algorithm, ["dpsize", "goo", "quickpick"][i % 3]);
        assert_eq!(row.n_relations, 6);
        assert_eq!(row.status, PlanStatus::Ok);
    }
}

#[test]
fn best_algorithm_normalizes_to_one() {
    let qs = queries(7, 5, 11);
    let report = run_benchmark(
        &qs,
        &["dpsize", "minsel", "goo"],
        &config(Duration::from_secs(10)),
    )
    .unwrap();
    let best = report.best_costs();
    for q in &qs {
        let rows: Vec<_> = report.rows.iter().filter(|r| r.query_id == q.id).collect();
        let min = rows
            .iter()
            .filter_map(|r| r.cost)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(best[q.id.as_str()], min);
        assert!(rows.iter().any(|r| r.normalized_cost == Some(1.0)));
        // dpsize is optimal over the no-cross space, which contains every heuristic plan here
        let dp = rows.iter().find(|r| r.algorithm == "dpsize").unwrap();
        assert_eq!(dp.normalized_cost, Some(1.0));
        for r in rows {
            assert!(r.normalized_cost.unwrap() >= 1.0);
        }
    }
}

#[test]
fn slow_algorithm_yields_timeout_rows_and_others_set_the_best_cost() {
    let qs = queries(16, 5, 3);
    let report = run_benchmark(
        &qs,
        &["brute-force", "goo", "adaptive"],
        &config(Duration::from_millis(20)),
    )
    .unwrap();
    assert_eq!(report.rows.len(), 15);
    for row in report.rows.iter().filter(|r| r.algorithm == "brute-force") {
        assert_eq!(row.status, PlanStatus::Timeout);
        assert_eq!(row.cost, None);
        assert_eq!(row.normalized_cost, None);
    }
    for q in &qs {
        let expected = report
            .rows
            .iter()
            .filter(|r| r.query_id == q.id && r.algorithm != "brute-force")
            .filter_map(|r| r.cost)
            .fold(f64::INFINITY, f64::min);
        assert_eq!(report.best_costs()[q.id.as_str()], expected);
    }
}

#[test]
fn unknown_label_fails_before_running_anything() {
    let qs = queries(16, 2, 3);
    // brute force would take far longer than this test if it ran
    let start = std::time::Instant::now();
    let err = run_benchmark(
        &qs,
        &["brute-force", "simulated-annealing"],
        &config(Duration::from_secs(600)),
    )
    .unwrap_err();
    assert!(matches!(err, BenchError::UnknownAlgorithm(ref l) if l == "simulated-annealing"));
    assert!(start.elapsed() < Duration::from_secs(1));
}

#[test]
fn reruns_are_identical_apart_from_wall_time() {
    let qs = queries(8, 4, 21);
    let labels = ["quickpick", "genetic", "goo-dp", "ikkbz"];
    let strip = |r: &BenchReport| {
        let mut text = Vec::new();
        let mut rows = r.clone();
        for row in &mut rows.rows {
            row.wall_time = Duration::ZERO;
        }
        rows.write_csv(&mut text).unwrap();
        text
    };
    let a = run_benchmark(
        &qs,
        &labels,
        &BenchConfig {
            workers: 2,
            ..config(Duration::from_secs(30))
        },
    )
    .unwrap();
    let b = run_benchmark(
        &qs,
        &labels,
        &BenchConfig {
            workers: 1,
            ..config(Duration::from_secs(30))
        },
    )
    .unwrap();
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn csv_round_trips() {
    let qs = queries(5, 3, 8);
    let report =
        run_benchmark(&qs, &["dpsize", "minsel"], &config(Duration::from_secs(10))).unwrap();
    let mut text = Vec::new();
    report.write_csv(&mut text).unwrap();
    let header = String::from_utf8(text.clone()).unwrap();
    assert!(header
        .starts_with("query_id,n_relations,algorithm,status,cost,normalized_cost,wall_time_ms\n"));
    let back = BenchReport::read_csv(text.as_slice()).unwrap();
    assert_eq!(back.rows.len(), report.rows.len());
    for (a, b) in back.rows.iter().zip(&report.rows) {
        assert_eq!(
            (&a.query_id, a.n_relations, &a.algorithm, a.status),
            (&b.query_id, b.n_relations, &b.algorithm, b.status)
        );
        assert_eq!(a.cost, b.cost);
        assert_eq!(a.normalized_cost, b.normalized_cost);
        assert!(a.wall_time.abs_diff(b.wall_time) < Duration::from_micros(1));
    }
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(BenchReport::read_csv("a,b\n1,2\n".as_bytes()).is_err());
    let bad = "query_id,n_relations,algorithm,status,cost,normalized_cost,wall_time_ms\nq,5,goo,fine,1,1,0.1\n";
    assert!(matches!(
        BenchReport::read_csv(bad.as_bytes()),
        Err(BenchError::Report(_))
    ));
}

#[test]
fn hybrid_runs_with_the_reference_solver() {
    let qs = queries(7, 2, 40);
    let cfg = BenchConfig {
        depths: vec![3],
        ..config(Duration::from_secs(20))
    };
    let report = run_benchmark(&qs, &["hybrid", "adaptive"], &cfg).unwrap();
    for pair in report.rows.chunks(2) {
        assert_eq!(pair[0].status, PlanStatus::Ok);
        assert!(pair[0].cost.unwrap() <= pair[1].cost.unwrap() * (1.0 + 1e-12));
    }
}

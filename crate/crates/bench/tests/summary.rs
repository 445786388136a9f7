use std::time::Duration;

use joinopt_bench::{render_summary, summarize, BenchError, BenchReport, BenchRow, DEFAULT_CAP};
use joinopt_core::PlanStatus;
use proptest::prelude::*;

fn row(
    query: usize,
    n: usize,
    algorithm: &str,
    status: PlanStatus,
    normalized: Option<f64>,
) -> BenchRow {
    BenchRow {
        query_id: format!("q{query}"),
        n_relations: n,
        algorithm: algorithm.into(),
        status,
        cost: normalized.map(|v| v * 100.0),
        normalized_cost: normalized,
        wall_time: Duration::from_millis(3),
    }
}

#[test]
fn optimal_algorithm_summarizes_to_one() {
    let report = BenchReport {
        rows: (0..4)
            .map(|q| row(q, 10, "dpsize", PlanStatus::Ok, Some(1.0)))
            .collect(),
    };
    let s = summarize(&report, DEFAULT_CAP).unwrap();
    assert_eq!(s.len(), 1);
    assert_eq!(
        (s[0].min, s[0].mean, s[0].max),
        (Some(1.0), Some(1.0), Some(1.0))
    );
    assert_eq!((s[0].count, s[0].not_available), (4, 0));
}

#[test]
fn values_at_or_above_the_cap_are_not_available() {
    let rows = vec![
        row(0, 10, "goo", PlanStatus::Ok, Some(1.0)),
        row(1, 10, "goo", PlanStatus::Ok, Some(3.0)),
        row(2, 10, "goo", PlanStatus::Ok, Some(25.0)),
        row(3, 10, "goo", PlanStatus::Ok, Some(20.0)),
    ];
    let s = summarize(&BenchReport { rows }, 20.0).unwrap();
    assert_eq!(s[0].not_available, 2);
    assert_eq!(s[0].mean, Some(2.0));
    assert_eq!(s[0].max, Some(3.0));
}

#[test]
fn timeouts_and_failures_are_not_available() {
    let rows = vec![
        row(0, 12, "dpsize", PlanStatus::Timeout, None),
        row(1, 12, "dpsize", PlanStatus::Error, None),
        row(2, 12, "dpsize", PlanStatus::Ok, Some(1.0)),
    ];
    let s = summarize(&BenchReport { rows }, 20.0).unwrap();
    assert_eq!((s[0].count, s[0].not_available), (1, 2));
}

#[test]
fn only_na_group_has_no_statistics() {
    let s = summarize(
        &BenchReport {
            rows: vec![row(0, 5, "x", PlanStatus::Timeout, None)],
        },
        20.0,
    )
    .unwrap();
    assert_eq!((s[0].min, s[0].mean, s[0].max), (None, None, None));
    assert!(render_summary(&s).contains("x"));
}

#[test]
fn groups_follow_first_appearance_then_size() {
    let rows = vec![
        row(0, 12, "goo", PlanStatus::Ok, Some(1.0)),
        row(0, 12, "adaptive", PlanStatus::Ok, Some(1.5)),
        row(1, 8, "goo", PlanStatus::Ok, Some(1.0)),
        row(1, 8, "adaptive", PlanStatus::Ok, Some(1.0)),
    ];
    let s = summarize(&BenchReport { rows }, 20.0).unwrap();
    let keys: Vec<_> = s
        .iter()
        .map(|r| (r.algorithm.as_str(), r.n_relations))
        .collect();
    assert_eq!(
        keys,
        [("goo", 8), ("goo", 12), ("adaptive", 8), ("adaptive", 12)]
    );
}

#[test]
fn empty_reports_and_bad_caps_are_errors() {
    assert!(matches!(
        summarize(&BenchReport::default(), 20.0),
        Err(BenchError::Report(_))
    ));
    let report = BenchReport {
        rows: vec![row(0, 5, "x", PlanStatus::Ok, Some(1.0))],
    };
    assert!(matches!(
        summarize(&report, 1.0),
        Err(BenchError::InvalidArgument(_))
    ));
    assert!(summarize(&report, f64::NAN).is_err());
}

fn arb_row() -> impl Strategy<Value = BenchRow> {
    (
        0usize..6,
        4usize..7,
        0usize..3,
        prop::bool::weighted(0.8),
        1.0f64..60.0,
    )
        .prop_map(|(q, n, a, ok, v)| {
            let status = if ok {
                PlanStatus::Ok
            } else {
                PlanStatus::Timeout
            };
            row(
                q,
                n,
                ["goo", "minsel", "hybrid"][a],
                status,
                ok.then_some(v),
            )
        })
}

proptest! {
    #[test]
    fn summary_accounts_for_every_row(rows in prop::collection::vec(arb_row(), 1..40), cap in 1.5f64..40.0) {
        let report = BenchReport { rows: rows.clone() };
        let s = summarize(&report, cap).unwrap();
        prop_assert_eq!(s.iter().map(|r| r.count + r.not_available).sum::<usize>(), rows.len());
        for r in &s {
            if let (Some(lo), Some(mean), Some(hi)) = (r.min, r.mean, r.max) {
                prop_assert!(1.0 <= lo && lo <= mean + 1e-12 && mean <= hi + 1e-12 && hi < cap);
            } else {
                prop_assert_eq!(r.count, 0);
            }
        }
        // capping is presentation only
        prop_assert_eq!(report.rows, rows);
    }

    #[test]
    fn csv_round_trip_is_exact(rows in prop::collection::vec(arb_row(), 0..20)) {
        let report = BenchReport { rows };
        let mut text = Vec::new();
        report.write_csv(&mut text).unwrap();
        let back = BenchReport::read_csv(text.as_slice()).unwrap();
        prop_assert_eq!(back, report);
    }
}

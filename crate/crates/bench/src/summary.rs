use std::collections::BTreeMap;
use std::fmt::Write;

use joinopt_core::PlanStatus;

use crate::error::{BenchError, Result};
use crate::report::BenchReport;

pub const DEFAULT_CAP: f64 = 20.0;

/// Normalized-cost statistics for one algorithm at one query size.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub algorithm: String,
    pub n_relations: usize,
    /// Rows that produced a plan below the cap.
    pub count: usize,
    pub min: Option<f64>,
    pub mean: Option<f64>,
    pub max: Option<f64>,
    /// Timeouts, failures and plans at or above the cap.
    pub not_available: usize,
}

/// Groups rows by algorithm (in order of first appearance) and relation count.
pub fn summarize(report: &BenchReport, cap: f64) -> Result<Vec<SummaryRow>> {
    if cap.is_nan() || cap <= 1.0 {
        return Err(BenchError::InvalidArgument(format!(
            "cap must exceed 1, got {cap}"
        )));
    }
    if report.rows.is_empty() {
        return Err(BenchError::Report("report has no rows".into()));
    }
    let mut order: Vec<&str> = Vec::new();
    let mut groups: BTreeMap<(usize, usize), (Vec<f64>, usize)> = BTreeMap::new();
    for row in &report.rows {
        let a = match order.iter().position(|&o| o == row.algorithm) {
            Some(a) => a,
            None => {
                order.push(&row.algorithm);
                order.len() - 1
            }
        };
        let group = groups.entry((a, row.n_relations)).or_default();
        match (row.status, row.normalized_cost) {
            (PlanStatus::Ok, Some(v)) if v < cap => group.0.push(v),
            _ => group.1 += 1,
        }
    }
    Ok(groups
        .into_iter()
        .map(|((a, n), (values, na))| {
            let count = values.len();
            let (min, mean, max) = if count == 0 {
                (None, None, None)
            } else {
                let min = values.iter().copied().fold(f64::INFINITY, f64::min);
                let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (
                    Some(min),
                    Some(values.iter().sum::<f64>() / count as f64),
                    Some(max),
                )
            };
            SummaryRow {
                algorithm: order[a].to_string(),
                n_relations: n,
                count,
                min,
                mean,
                max,
                not_available: na,
            }
        })
        .collect())
}

pub fn render_summary(rows: &[SummaryRow]) -> String {
    let cell = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.3}"));
    let mut out = format!(
        "{:<12} {:>4} {:>5} {:>10} {:>10} {:>10} {:>4}\n",
        "algorithm", "n", "count", "min", "mean", "max", "N/A"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:<12} {:>4} {:>5} {:>10} {:>10} {:>10} {:>4}",
            r.algorithm,
            r.n_relations,
            r.count,
            cell(r.min),
            cell(r.mean),
            cell(r.max),
            r.not_available
        );
    }
    out
}

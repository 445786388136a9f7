use std::collections::HashMap;
use std::io::{Read, Write};
use std::time::Duration;

use joinopt_core::{PlanStatus, QueryGraph};
use rayon::prelude::*;

use crate::algorithms::{parse_algorithms, run_algorithm, BenchConfig};
use crate::error::{BenchError, Result};

#[derive(Debug, Clone)]
pub struct Query {
    pub id: String,
    pub graph: QueryGraph,
}

impl Query {
    pub fn new(id: impl Into<String>, graph: QueryGraph) -> Self {
        Self {
            id: id.into(),
            graph,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub query_id: String,
    pub n_relations: usize,
    pub algorithm: String,
    pub status: PlanStatus,
    pub cost: Option<f64>,
    /// Cost divided by the best cost any algorithm found for the query.
    pub normalized_cost: Option<f64>,
    pub wall_time: Duration,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

const HEADER: [&str; 7] = [
    "query_id",
    "n_relations",
    "algorithm",
    "status",
    "cost",
    "normalized_cost",
    "wall_time_ms",
];

impl BenchReport {
    /// Builds a report from raw rows, filling in normalized costs.
    pub fn new(rows: Vec<BenchRow>) -> Self {
        let mut report = Self { rows };
        report.normalize();
        report
    }

    /// Lowest successful cost per query.
    pub fn best_costs(&self) -> HashMap<&str, f64> {
        let mut best: HashMap<&str, f64> = HashMap::new();
        for row in &self.rows {
            if let (PlanStatus::Ok, Some(c)) = (row.status, row.cost) {
                best.entry(&row.query_id)
                    .and_modify(|b| *b = b.min(c))
                    .or_insert(c);
            }
        }
        best
    }

    fn normalize(&mut self) {
        let best: HashMap<String, f64> = self
            .best_costs()
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect();
        for row in &mut self.rows {
            row.normalized_cost = match (row.status, row.cost, best.get(&row.query_id)) {
                (PlanStatus::Ok, Some(c), Some(&b)) => Some(ratio(c, b)),
                _ => None,
            };
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(HEADER)?;
        for row in &self.rows {
            w.write_record([
                row.query_id.clone(),
                row.n_relations.to_string(),
                row.algorithm.clone(),
                row.status.as_str().to_string(),
                row.cost.map(|c| c.to_string()).unwrap_or_default(),
                row.normalized_cost
                    .map(|c| c.to_string())
                    .unwrap_or_default(),
                format!("{:.3}", row.wall_time.as_secs_f64() * 1000.0),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(reader);
        if r.headers()?.iter().ne(HEADER) {
            return Err(BenchError::Report(format!(
                "expected columns {}",
                HEADER.join(",")
            )));
        }
        let mut rows = Vec::new();
        for (i, record) in r.records().enumerate() {
            let record = record?;
            let line = i + 2;
            let field = |j: usize| record.get(j).unwrap_or("");
            let bad = |what: &str| BenchError::Report(format!("line {line}: invalid {what}"));
            let optional = |j: usize, what: &str| -> Result<Option<f64>> {
                match field(j) {
                    "" => Ok(None),
                    s => s.parse().map(Some).map_err(|_| bad(what)),
                }
            };
            let wall_ms: f64 = field(6).parse().map_err(|_| bad("wall time"))?;
            if !(wall_ms >= 0.0 && wall_ms.is_finite()) {
                return Err(bad("wall time"));
            }
            rows.push(BenchRow {
                query_id: field(0).to_string(),
                n_relations: field(1).parse().map_err(|_| bad("relation count"))?,
                algorithm: field(2).to_string(),
                status: field(3).parse().map_err(|_| bad("status"))?,
                cost: optional(4, "cost")?,
                normalized_cost: optional(5, "normalized cost")?,
                wall_time: Duration::from_secs_f64(wall_ms / 1000.0),
            });
        }
        Ok(Self { rows })
    }
}

fn ratio(cost: f64, best: f64) -> f64 {
    if best > 0.0 {
        cost / best
    } else if cost <= 0.0 {
        1.0
    } else {
        f64::INFINITY
    }
}

/// Runs every algorithm on every query. Labels are validated before any
/// work starts; rows come back in query-major, label order.
pub fn run_benchmark<S: AsRef<str>>(
    queries: &[Query],
    labels: &[S],
    config: &BenchConfig,
) -> Result<BenchReport> {
    let algorithms = parse_algorithms(labels)?;
    if config.workers == 0 {
        return Err(BenchError::InvalidArgument(
            "workers must be positive".into(),
        ));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| BenchError::InvalidArgument(e.to_string()))?;
    let jobs: Vec<(usize, usize)> = (0..queries.len())
        .flat_map(|q| (0..algorithms.len()).map(move |a| (q, a)))
        .collect();
    let rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(q, a)| {
                let query = &queries[q];
                let result = run_algorithm(
                    &query.graph,
                    algorithms[a],
                    config,
                    config.seed.wrapping_add(q as u64),
                );
                BenchRow {
                    query_id: query.id.clone(),
                    n_relations: query.graph.n_relations(),
                    algorithm: result.algorithm,
                    status: result.status,
                    cost: result.cost,
                    normalized_cost: None,
                    wall_time: result.wall_time,
                }
            })
            .collect()
    });
    Ok(BenchReport::new(rows))
}

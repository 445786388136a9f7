use std::time::Duration;

use joinopt_core::QueryGraph;
use joinopt_milp::{
    depth_model, hybrid_thresholds, Incumbent, MilpSolver, SolveStatus, SolverConfig,
};

use crate::error::{BenchError, Result};

/// A sample counts as converged once it is within this factor of the final objective.
pub const CONVERGENCE_FACTOR: f64 = 1.2;

const THRESHOLD_COUNT: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct Convergence {
    pub status: SolveStatus,
    /// Best objective known at each multiple of the sampling interval.
    pub samples: Vec<(Duration, f64)>,
    pub final_objective: Option<f64>,
    pub convergence_time: Option<Duration>,
    pub wall_time: Duration,
}

/// Solves the depth-`depth` model for `graph` and samples the solver's
/// incumbent objective every `interval`.
pub fn measure_convergence(
    graph: &QueryGraph,
    solver: &SolverConfig,
    interval: Duration,
    depth: usize,
) -> Result<Convergence> {
    if interval.is_zero() {
        return Err(BenchError::InvalidArgument(
            "sampling interval must be positive".into(),
        ));
    }
    let thresholds = hybrid_thresholds(graph, THRESHOLD_COUNT)?;
    let (_, model) = depth_model(graph, depth, &thresholds, None)?;
    let assignment = solver.solve(&model);
    let final_point = assignment
        .objective
        .filter(|_| assignment.status.has_solution())
        .map(|o| (assignment.wall_time, o));
    let samples = sample_incumbents(
        &assignment.incumbents,
        final_point,
        interval,
        assignment.wall_time,
    );
    let final_objective = final_point.map(|(_, o)| o);
    let convergence_time = final_objective.and_then(|f| {
        samples
            .iter()
            .find(|&&(_, v)| v <= CONVERGENCE_FACTOR * f)
            .map(|&(t, _)| t)
    });
    Ok(Convergence {
        status: assignment.status,
        samples,
        final_objective,
        convergence_time,
        wall_time: assignment.wall_time,
    })
}

/// Best-so-far objective at `interval`, `2 * interval`, ... up to `horizon`
/// (plus one trailing sample covering it). Samples start at the first
/// incumbent; with none the series is empty.
pub fn sample_incumbents(
    incumbents: &[Incumbent],
    final_point: Option<(Duration, f64)>,
    interval: Duration,
    horizon: Duration,
) -> Vec<(Duration, f64)> {
    let mut points: Vec<(Duration, f64)> =
        incumbents.iter().map(|i| (i.time, i.objective)).collect();
    if points.is_empty() {
        return Vec::new();
    }
    points.extend(final_point);
    points.sort_by_key(|p| p.0);
    let horizon = points
        .iter()
        .map(|p| p.0)
        .max()
        .unwrap_or_default()
        .max(horizon);
    let mut samples = Vec::new();
    let mut best = f64::INFINITY;
    let mut next = 0;
    let mut t = interval;
    loop {
        while next < points.len() && points[next].0 <= t {
            best = best.min(points[next].1);
            next += 1;
        }
        if best.is_finite() {
            samples.push((t, best));
        }
        if t >= horizon {
            break;
        }
        t += interval;
    }
    samples
}

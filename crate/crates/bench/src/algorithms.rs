use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use joinopt_core::exact::{brute_force_optimal_until, dpsize_until};
use joinopt_core::heuristics::{
    adaptive, genetic_with_history, goo, goo_dp, ikkbz, minsel, quickpick_until, GeneticConfig,
};
use joinopt_core::{Deadline, PlanResult, PlanStatus, QueryGraph};
use joinopt_milp::{hybrid_milp_with, HybridOptions, MilpSolver, ReferenceSolver, SolverConfig};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DpSize,
    /// Exhaustive search including cross products.
    BruteForce,
    Ikkbz,
    Adaptive,
    Goo,
    GooDp,
    Minsel,
    QuickPick,
    Genetic,
    Hybrid,
}

impl Algorithm {
    pub const ALL: [Algorithm; 10] = [
        Algorithm::DpSize,
        Algorithm::BruteForce,
        Algorithm::Ikkbz,
        Algorithm::Adaptive,
        Algorithm::Goo,
        Algorithm::GooDp,
        Algorithm::Minsel,
        Algorithm::QuickPick,
        Algorithm::Genetic,
        Algorithm::Hybrid,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Algorithm::DpSize => "dpsize",
            Algorithm::BruteForce => "brute-force",
            Algorithm::Ikkbz => "ikkbz",
            Algorithm::Adaptive => "adaptive",
            Algorithm::Goo => "goo",
            Algorithm::GooDp => "goo-dp",
            Algorithm::Minsel => "minsel",
            Algorithm::QuickPick => "quickpick",
            Algorithm::Genetic => "genetic",
            Algorithm::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Algorithm {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.label() == s)
            .ok_or_else(|| BenchError::UnknownAlgorithm(s.to_string()))
    }
}

/// Parses labels, failing on the first unknown one. Duplicates are dropped.
pub fn parse_algorithms<S: AsRef<str>>(labels: &[S]) -> Result<Vec<Algorithm>> {
    let mut out = Vec::new();
    for label in labels {
        let a: Algorithm = label.as_ref().trim().parse()?;
        if !out.contains(&a) {
            out.push(a);
        }
    }
    if out.is_empty() {
        return Err(BenchError::InvalidArgument("no algorithms given".into()));
    }
    Ok(out)
}

/// Back end for the MILP part of the hybrid method.
#[derive(Debug, Clone, PartialEq)]
pub enum HybridSolver {
    External(SolverConfig),
    Reference,
}

impl HybridSolver {
    /// An external solver if one can be found, the reference search otherwise.
    pub fn discover() -> Self {
        match SolverConfig::discover(Duration::from_secs(60)) {
            Some(c) => HybridSolver::External(c),
            None => HybridSolver::Reference,
        }
    }

    fn with_time_limit(&self, limit: Duration) -> Box<dyn MilpSolver> {
        match self {
            HybridSolver::External(c) => Box::new(c.clone().with_time_limit(limit)),
            HybridSolver::Reference => Box::new(ReferenceSolver {
                time_limit: Some(limit),
                ..ReferenceSolver::default()
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub timeout: Duration,
    /// Base seed; query `i` runs the randomized algorithms with `seed + i`.
    pub seed: u64,
    pub workers: usize,
    pub depths: Vec<usize>,
    pub solver: HybridSolver,
    /// Share of the timeout each MILP configuration may use.
    pub solver_share: f64,
    pub quickpick_trials: usize,
    pub genetic: GeneticConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            timeout: Duration::from_secs(60),
            seed: 0,
            workers: 1,
            depths: vec![4, 5, 6, 7],
            solver: HybridSolver::Reference,
            solver_share: 0.8,
            quickpick_trials: 1000,
            genetic: GeneticConfig::default(),
        }
    }
}

/// Runs one algorithm under `config.timeout`. Failures become results with a
/// non-ok status; a plan that arrives after the deadline counts as a timeout.
pub fn run_algorithm(
    graph: &QueryGraph,
    algorithm: Algorithm,
    config: &BenchConfig,
    seed: u64,
) -> PlanResult {
    let start = Instant::now();
    let deadline = Deadline::after(config.timeout);
    let outcome = match algorithm {
        Algorithm::DpSize => dpsize_until(graph, deadline).map_err(BenchError::from),
        Algorithm::BruteForce => {
            brute_force_optimal_until(graph, true, deadline).map_err(BenchError::from)
        }
        Algorithm::Ikkbz => ikkbz(graph).map(|r| r.plan).map_err(BenchError::from),
        Algorithm::Adaptive => adaptive(graph).map_err(BenchError::from),
        Algorithm::Goo => goo(graph).map_err(BenchError::from),
        Algorithm::GooDp => goo_dp(graph).map_err(BenchError::from),
        Algorithm::Minsel => minsel(graph).map_err(BenchError::from),
        Algorithm::QuickPick => quickpick_until(graph, config.quickpick_trials, seed, deadline)
            .map_err(BenchError::from),
        Algorithm::Genetic => genetic_with_history(graph, &config.genetic, seed, deadline)
            .map(|r| r.plan)
            .map_err(BenchError::from),
        Algorithm::Hybrid => {
            let limit = config
                .timeout
                .mul_f64(config.solver_share)
                .max(Duration::from_millis(1));
            let solver = config.solver.with_time_limit(limit);
            let options = HybridOptions {
                depths: config.depths.clone(),
                ..HybridOptions::default()
            };
            hybrid_milp_with(graph, &options, solver.as_ref()).map_err(BenchError::from)
        }
    };
    let elapsed = start.elapsed();
    let mut result = match outcome {
        Ok(r) => r,
        Err(e) => PlanResult::failed(algorithm.label(), PlanStatus::Error, elapsed, e.to_string()),
    };
    result.algorithm = algorithm.label().to_string();
    result.wall_time = elapsed;
    // the hybrid method bounds its own solver time and always keeps a plan
    if algorithm != Algorithm::Hybrid && result.status == PlanStatus::Ok && elapsed > config.timeout
    {
        result = PlanResult::failed(
            algorithm.label(),
            PlanStatus::Timeout,
            elapsed,
            "finished after the time limit",
        );
    }
    result
}

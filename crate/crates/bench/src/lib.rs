//! Benchmark harness: runs join-ordering algorithms over query sets under a
//! time limit, normalizes costs per query, summarizes them with a cap and
//! samples MILP solver convergence.

pub mod algorithms;
pub mod convergence;
pub mod error;
pub mod plot;
pub mod report;
pub mod summary;

pub use algorithms::{parse_algorithms, run_algorithm, Algorithm, BenchConfig, HybridSolver};
pub use convergence::{measure_convergence, sample_incumbents, Convergence, CONVERGENCE_FACTOR};
pub use error::{BenchError, Result};
pub use plot::plot_svg;
pub use report::{run_benchmark, BenchReport, BenchRow, Query};
pub use summary::{render_summary, summarize, SummaryRow, DEFAULT_CAP};

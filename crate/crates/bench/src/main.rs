use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use joinopt_bench::{
    measure_convergence, parse_algorithms, plot_svg, render_summary, run_algorithm, run_benchmark,
    summarize, BenchConfig, BenchReport, HybridSolver, Query, DEFAULT_CAP,
};
use joinopt_core::generate::{generate_tree_query, GeneratorParams};
use joinopt_core::io::{read_graph, write_graph};
use joinopt_core::QueryGraph;
use joinopt_milp::SolverConfig;

#[derive(Parser)]
#[command(
    name = "joinopt",
    version,
    about = "Join ordering with heuristics, exact search and MILP"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write random acyclic queries, one file per query.
    Generate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Optimize a single query and print the plan.
    Optimize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "adaptive")]
        algo: String,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6, 7])]
        depths: Vec<usize>,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        timeout: Duration,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run algorithms over a query directory and write a CSV report.
    Bench {
        /// Directory of query files, or a single query file.
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_delimiter = ',')]
        algos: Vec<String>,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        timeout: Duration,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_delimiter = ',', default_values_t = [4, 5, 6, 7])]
        depths: Vec<usize>,
    },
    /// Print capped normalized-cost statistics for a report.
    Summarize {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: f64,
    },
    /// Sample the external solver's incumbent over time.
    Convergence {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value = "1s", value_parser = humantime::parse_duration)]
        interval: Duration,
        #[arg(long, default_value = "60s", value_parser = humantime::parse_duration)]
        time_limit: Duration,
        #[arg(long, default_value_t = 4)]
        depth: usize,
    },
    /// Render a report summary as SVG.
    Plot {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Generate {
            n,
            count,
            seed,
            out,
        } => {
            fs::create_dir_all(&out).with_context(|| format!("creating {}", out.display()))?;
            for i in 0..count {
                let graph =
                    generate_tree_query(&GeneratorParams::new(n, seed.wrapping_add(i as u64)))?;
                let path = out.join(format!("q{n}_{i:04}.graph"));
                fs::write(&path, write_graph(&graph)?)
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            println!("wrote {count} queries to {}", out.display());
        }
        Command::Optimize {
            graph,
            algo,
            depths,
            timeout,
            seed,
        } => {
            let g = load_graph(&graph)?;
            let algorithm = parse_algorithms(&[algo])?[0];
            let config = BenchConfig {
                timeout,
                seed,
                depths,
                solver: HybridSolver::discover(),
                ..BenchConfig::default()
            };
            let result = run_algorithm(&g, algorithm, &config, seed);
            println!("algorithm: {}", result.algorithm);
            println!("status: {}", result.status);
            if let Some(cost) = result.cost {
                println!("cost: {cost}");
            }
            if let Some(tree) = &result.tree {
                println!("plan: {}", tree.display(&g));
            }
            println!(
                "wall time: {}",
                humantime::format_duration(round_ms(result.wall_time))
            );
            for note in &result.notes {
                println!("note: {note}");
            }
        }
        Command::Bench {
            queries,
            algos,
            timeout,
            out,
            workers,
            seed,
            depths,
        } => {
            if algos.is_empty() {
                bail!("--algos needs at least one algorithm");
            }
            parse_algorithms(&algos)?;
            let queries = load_queries(&queries)?;
            let solver = if algos.iter().any(|a| a == "hybrid") {
                HybridSolver::discover()
            } else {
                HybridSolver::Reference
            };
            let config = BenchConfig {
                timeout,
                seed,
                workers,
                depths,
                solver,
                ..BenchConfig::default()
            };
            let report = run_benchmark(&queries, &algos, &config)?;
            let file =
                fs::File::create(&out).with_context(|| format!("creating {}", out.display()))?;
            report.write_csv(file)?;
            println!("wrote {} rows to {}", report.rows.len(), out.display());
        }
        Command::Summarize { report, cap } => {
            let rows = summarize(&load_report(&report)?, cap)?;
            print!("{}", render_summary(&rows));
        }
        Command::Convergence {
            graph,
            interval,
            time_limit,
            depth,
        } => {
            let g = load_graph(&graph)?;
            let Some(solver) = SolverConfig::discover(time_limit) else {
                bail!("no external MILP solver found; set JOINOPT_SOLVER_CMD or install cbc");
            };
            let c = measure_convergence(&g, &solver, interval, depth)?;
            println!("status: {}", c.status);
            println!("time_s,objective");
            for (t, v) in &c.samples {
                println!("{:.3},{v}", t.as_secs_f64());
            }
            match c.convergence_time {
                Some(t) => println!(
                    "converged after {}",
                    humantime::format_duration(round_ms(t))
                ),
                None => println!("no convergence point"),
            }
        }
        Command::Plot { report, cap, out } => {
            let rows = summarize(&load_report(&report)?, cap)?;
            fs::write(&out, plot_svg(&rows, cap)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
        }
    }
    Ok(())
}

fn round_ms(d: Duration) -> Duration {
    Duration::from_millis(d.as_millis() as u64)
}

fn load_graph(path: &Path) -> Result<QueryGraph> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    read_graph(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_report(path: &Path) -> Result<BenchReport> {
    let file = fs::File::open(path).with_context(|| format!("reading {}", path.display()))?;
    BenchReport::read_csv(file).with_context(|| format!("parsing {}", path.display()))
}

fn load_queries(path: &Path) -> Result<Vec<Query>> {
    let files = if path.is_dir() {
        let mut files: Vec<PathBuf> = fs::read_dir(path)
            .with_context(|| format!("listing {}", path.display()))?
            .map(|e| e.map(|e| e.path()))
            .collect::<std::io::Result<_>>()?;
        files.retain(|p| p.extension().is_some_and(|e| e == "graph"));
        files.sort();
        files
    } else {
        vec![path.to_path_buf()]
    };
    if files.is_empty() {
        bail!("no .graph files in {}", path.display());
    }
    files
        .iter()
        .map(|f| {
            let id = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(Query::new(id, load_graph(f)?))
        })
        .collect()
}

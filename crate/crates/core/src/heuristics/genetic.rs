//! Genetic join ordering.
//!
//! An individual is a permutation of the edge pool; it decodes to a join tree
//! the same way QuickPick builds one, so every individual is a valid plan.
//! Selection is by tournament, recombination is order crossover (OX1), and
//! mutation swaps two positions.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{edge_pool, tree_from_edge_sequence};
use crate::error::{Error, Result};
use crate::graph::{QueryGraph, RelId};
use crate::plan::{Deadline, PlanResult, PlanStatus};
use crate::tree::{cost_unchecked, JoinTree};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneticBudget {
    Generations(usize),
    /// Evolve until this much wall time has passed. Not reproducible.
    Time(Duration),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneticConfig {
    pub population: usize,
    pub tournament: usize,
    pub mutation_rate: f64,
    pub elitism: usize,
    pub budget: GeneticBudget,
}

impl Default for GeneticConfig {
    fn default() -> Self {
        Self {
            population: 100,
            tournament: 4,
            mutation_rate: 0.1,
            elitism: 2,
            budget: GeneticBudget::Generations(100),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneticRun {
    pub plan: PlanResult,
    /// Best cost after initialization and after every generation.
    pub history: Vec<f64>,
}

pub fn genetic(graph: &QueryGraph, budget: GeneticBudget, seed: u64) -> Result<PlanResult> {
    let config = GeneticConfig {
        budget,
        ..GeneticConfig::default()
    };
    Ok(genetic_with_history(graph, &config, seed, Deadline::NONE)?.plan)
}

pub fn genetic_with_history(
    graph: &QueryGraph,
    config: &GeneticConfig,
    seed: u64,
    deadline: Deadline,
) -> Result<GeneticRun> {
    const NAME: &str = "genetic";
    let start = Instant::now();
    if graph.n_relations() < 2 {
        return Err(Error::InvalidArgument(
            "genetic needs at least 2 relations".into(),
        ));
    }
    if config.population < 2 || config.tournament == 0 || config.elitism >= config.population {
        return Err(Error::InvalidArgument(format!(
            "invalid genetic configuration {config:?}"
        )));
    }

    let n = graph.n_relations();
    let edges = edge_pool(graph);
    let m = edges.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let evaluate = |genome: &[usize]| -> f64 { cost_unchecked(graph, &decode(n, &edges, genome)) };

    let mut population: Vec<(Vec<usize>, f64)> = (0..config.population)
        .map(|_| {
            let mut g: Vec<usize> = (0..m).collect();
            g.shuffle(&mut rng);
            let f = evaluate(&g);
            (g, f)
        })
        .collect();
    sort_by_fitness(&mut population);
    let mut history = vec![population[0].1];

    let mut generation = 0usize;
    loop {
        let done = match config.budget {
            GeneticBudget::Generations(g) => generation >= g,
            GeneticBudget::Time(t) => start.elapsed() >= t,
        };
        if done {
            break;
        }
        if deadline.expired() {
            return Ok(GeneticRun {
                plan: PlanResult::failed(
                    NAME,
                    PlanStatus::Timeout,
                    start.elapsed(),
                    "deadline reached",
                ),
                history,
            });
        }

        let mut next: Vec<(Vec<usize>, f64)> = population[..config.elitism].to_vec();
        while next.len() < config.population {
            let a = tournament(&population, config.tournament, &mut rng);
            let b = tournament(&population, config.tournament, &mut rng);
            let mut child = order_crossover(&population[a].0, &population[b].0, &mut rng);
            if m >= 2 && rng.gen_bool(config.mutation_rate) {
                let i = rng.gen_range(0..m);
                let j = rng.gen_range(0..m);
                child.swap(i, j);
            }
            let f = evaluate(&child);
            next.push((child, f));
        }
        population = next;
        sort_by_fitness(&mut population);
        history.push(population[0].1);
        generation += 1;
    }

    let tree = decode(n, &edges, &population[0].0);
    Ok(GeneticRun {
        plan: PlanResult::ok(NAME, graph, tree, start.elapsed())?,
        history,
    })
}

fn decode(n: usize, edges: &[(RelId, RelId)], genome: &[usize]) -> JoinTree {
    tree_from_edge_sequence(n, edges, genome.iter().copied())
}

/// Stable sort, so equally fit individuals keep their relative order.
fn sort_by_fitness(pop: &mut [(Vec<usize>, f64)]) {
    pop.sort_by(|a, b| a.1.total_cmp(&b.1));
}

fn tournament(pop: &[(Vec<usize>, f64)], size: usize, rng: &mut ChaCha8Rng) -> usize {
    // The population is sorted, so the lowest drawn index is the fittest.
    (0..size)
        .map(|_| rng.gen_range(0..pop.len()))
        .min()
        .unwrap()
}

/// OX1: copy a random slice from `a`, fill the rest in `b`'s order starting
/// after the slice.
fn order_crossover(a: &[usize], b: &[usize], rng: &mut ChaCha8Rng) -> Vec<usize> {
    let m = a.len();
    if m < 2 {
        return a.to_vec();
    }
    let mut lo = rng.gen_range(0..m);
    let mut hi = rng.gen_range(0..m);
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    let mut child = vec![usize::MAX; m];
    let mut used = vec![false; m];
    for i in lo..=hi {
        child[i] = a[i];
        used[a[i]] = true;
    }
    let mut pos = (hi + 1) % m;
    for k in 0..m {
        let gene = b[(hi + 1 + k) % m];
        if used[gene] {
            continue;
        }
        child[pos] = gene;
        used[gene] = true;
        pos = (pos + 1) % m;
    }
    child
}

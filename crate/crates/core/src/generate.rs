//! Random tree-query generator.
//!
//! The topology is a uniformly random labelled tree decoded from a Prüfer
//! sequence; cardinalities and selectivities are drawn log-uniformly.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::QueryGraph;

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub n_relations: usize,
    pub seed: u64,
    /// Cardinalities are `10^x` with `x` uniform in this range.
    pub card_log10_range: (f64, f64),
    /// Selectivities are `10^x` with `x` uniform in this range.
    pub sel_log10_range: (f64, f64),
}

impl GeneratorParams {
    pub fn new(n_relations: usize, seed: u64) -> Self {
        Self {
            n_relations,
            seed,
            card_log10_range: (1.0, 6.0),
            sel_log10_range: (-4.0, 0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.n_relations < 2 {
            return bad(format!("n_relations = {} (need >= 2)", self.n_relations));
        }
        if self.n_relations > crate::relset::MAX_RELATIONS {
            return bad(format!(
                "n_relations = {} exceeds the maximum",
                self.n_relations
            ));
        }
        let (c0, c1) = self.card_log10_range;
        if !(c0.is_finite() && c1.is_finite() && 0.0 <= c0 && c0 <= c1) {
            return bad(format!(
                "card_log10_range ({c0}, {c1}) must satisfy 0 <= min <= max"
            ));
        }
        let (s0, s1) = self.sel_log10_range;
        if !(s0.is_finite() && s1.is_finite() && s0 <= s1 && s1 <= 0.0) {
            return bad(format!(
                "sel_log10_range ({s0}, {s1}) must satisfy min <= max <= 0"
            ));
        }
        Ok(())
    }
}

/// Generates a connected acyclic query graph. Identical parameters always
/// produce an identical graph.
pub fn generate_tree_query(params: &GeneratorParams) -> Result<QueryGraph> {
    params.validate()?;
    let n = params.n_relations;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);

    let prufer: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut edges = prufer_edges(n, &prufer);
    edges.sort_unstable();

    let log_uniform =
        |rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)| 10f64.powf(lo + rng.gen::<f64>() * (hi - lo));
    let cards: Vec<f64> = (0..n)
        .map(|_| log_uniform(&mut rng, params.card_log10_range).max(1.0))
        .collect();
    let preds: Vec<(usize, usize, f64)> = edges
        .into_iter()
        .map(|(a, b)| {
            let s = log_uniform(&mut rng, params.sel_log10_range);
            (a, b, s.clamp(f64::MIN_POSITIVE, 1.0))
        })
        .collect();
    QueryGraph::from_parts(&cards, &preds)
}

/// Decodes a Prüfer sequence over `n` labels into the edges of its tree,
/// each edge as `(smaller, larger)`.
fn prufer_edges(n: usize, seq: &[usize]) -> Vec<(usize, usize)> {
    debug_assert_eq!(seq.len() + 2, n);
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let leaf = (0..n)
            .find(|&u| degree[u] == 1)
            .expect("a leaf always exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] -= 1;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

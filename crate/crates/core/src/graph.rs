//! Query graphs: relations labelled with cardinalities, joined by predicates
//! labelled with selectivities.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::relset::{RelSet, MAX_RELATIONS};

/// Index of a relation inside its query graph.
pub type RelId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: RelId,
    pub name: String,
    pub cardinality: f64,
}

/// A join predicate between two distinct relations. Stored with
/// `rel_a < rel_b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predicate {
    pub rel_a: RelId,
    pub rel_b: RelId,
    pub selectivity: f64,
}

impl Predicate {
    pub fn endpoints(&self) -> RelSet {
        RelSet::single(self.rel_a).with(self.rel_b)
    }

    pub fn other(&self, rel: RelId) -> RelId {
        if rel == self.rel_a {
            self.rel_b
        } else {
            self.rel_a
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueryGraph {
    relations: Vec<Relation>,
    predicates: Vec<Predicate>,
    neighbors: Vec<RelSet>,
}

impl QueryGraph {
    /// Builds a graph, checking every invariant. Predicates on the same
    /// unordered pair are merged by multiplying their selectivities; the merged
    /// predicate keeps the position of the first occurrence.
    pub fn new(relations: Vec<Relation>, predicates: Vec<Predicate>) -> Result<Self> {
        if relations.is_empty() {
            return Err(Error::InvalidArgument(
                "query graph has no relations".into(),
            ));
        }
        if relations.len() > MAX_RELATIONS {
            return Err(Error::InvalidArgument(format!(
                "{} relations exceed the supported maximum of {MAX_RELATIONS}",
                relations.len()
            )));
        }
        for (i, rel) in relations.iter().enumerate() {
            if rel.id != i {
                return Err(Error::InvalidArgument(format!(
                    "relation at position {i} has id {} (ids must be 0..R-1 in order)",
                    rel.id
                )));
            }
            if !(rel.cardinality.is_finite() && rel.cardinality >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "relation {i} has cardinality {} (must be >= 1)",
                    rel.cardinality
                )));
            }
        }

        let n = relations.len();
        let mut merged: Vec<Predicate> = Vec::with_capacity(predicates.len());
        let mut slot: BTreeMap<(RelId, RelId), usize> = BTreeMap::new();
        for p in predicates {
            if p.rel_a >= n || p.rel_b >= n {
                return Err(Error::InvalidArgument(format!(
                    "predicate ({}, {}) references an unknown relation",
                    p.rel_a, p.rel_b
                )));
            }
            if p.rel_a == p.rel_b {
                return Err(Error::InvalidArgument(format!(
                    "predicate on relation {} joins it with itself",
                    p.rel_a
                )));
            }
            if !(p.selectivity > 0.0 && p.selectivity <= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "selectivity {} of predicate ({}, {}) out of (0,1]",
                    p.selectivity, p.rel_a, p.rel_b
                )));
            }
            let key = (p.rel_a.min(p.rel_b), p.rel_a.max(p.rel_b));
            match slot.get(&key) {
                Some(&i) => merged[i].selectivity *= p.selectivity,
                None => {
                    slot.insert(key, merged.len());
                    merged.push(Predicate {
                        rel_a: key.0,
                        rel_b: key.1,
                        selectivity: p.selectivity,
                    });
                }
            }
        }

        let mut neighbors = vec![RelSet::EMPTY; n];
        for p in &merged {
            neighbors[p.rel_a] = neighbors[p.rel_a].with(p.rel_b);
            neighbors[p.rel_b] = neighbors[p.rel_b].with(p.rel_a);
        }
        Ok(Self {
            relations,
            predicates: merged,
            neighbors,
        })
    }

    /// Convenience constructor naming relations `R0`, `R1`, ...
    pub fn from_parts(cardinalities: &[f64], predicates: &[(RelId, RelId, f64)]) -> Result<Self> {
        let names: Vec<String> = (0..cardinalities.len()).map(|i| format!("R{i}")).collect();
        Self::named(&names, cardinalities, predicates)
    }

    pub fn named<S: AsRef<str>>(
        names: &[S],
        cardinalities: &[f64],
        predicates: &[(RelId, RelId, f64)],
    ) -> Result<Self> {
        if names.len() != cardinalities.len() {
            return Err(Error::InvalidArgument(
                "names and cardinalities differ in length".into(),
            ));
        }
        let relations = names
            .iter()
            .zip(cardinalities)
            .enumerate()
            .map(|(id, (name, &cardinality))| Relation {
                id,
                name: name.as_ref().to_string(),
                cardinality,
            })
            .collect();
        let predicates = predicates
            .iter()
            .map(|&(rel_a, rel_b, selectivity)| Predicate {
                rel_a,
                rel_b,
                selectivity,
            })
            .collect();
        Self::new(relations, predicates)
    }

    pub fn relations(&self) -> &[Relation] {
        &self.relations
    }

    pub fn predicates(&self) -> &[Predicate] {
        &self.predicates
    }

    pub fn n_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn n_predicates(&self) -> usize {
        self.predicates.len()
    }

    pub fn cardinality(&self, rel: RelId) -> f64 {
        self.relations[rel].cardinality
    }

    pub fn all(&self) -> RelSet {
        RelSet::full(self.relations.len())
    }

    pub fn neighbors(&self, rel: RelId) -> RelSet {
        self.neighbors[rel]
    }

    /// Relations adjacent to any member of `set`, excluding `set` itself.
    pub fn neighborhood(&self, set: RelSet) -> RelSet {
        set.iter()
            .fold(RelSet::EMPTY, |acc, r| acc.union(self.neighbors[r]))
            .minus(set)
    }

    /// Selectivity of the predicate between `a` and `b`, if any.
    pub fn selectivity(&self, a: RelId, b: RelId) -> Option<f64> {
        let (lo, hi) = (a.min(b), a.max(b));
        self.predicates
            .iter()
            .find(|p| p.rel_a == lo && p.rel_b == hi)
            .map(|p| p.selectivity)
    }

    /// Output cardinality of joining exactly the relations in `set`: the
    /// product of their cardinalities times the selectivities of all
    /// predicates with both ends inside the set.
    pub fn intermediate_cardinality(&self, set: RelSet) -> Result<f64> {
        if set.is_empty() {
            return Err(Error::InvalidArgument("empty relation set".into()));
        }
        if !set.is_subset(self.all()) {
            return Err(Error::InvalidArgument(format!(
                "relation set {set:?} references unknown relations"
            )));
        }
        Ok(self.card(set))
    }

    /// Unchecked variant of [`intermediate_cardinality`](Self::intermediate_cardinality).
    pub(crate) fn card(&self, set: RelSet) -> f64 {
        let mut out: f64 = set.iter().map(|r| self.relations[r].cardinality).product();
        for p in &self.predicates {
            if set.contains(p.rel_a) && set.contains(p.rel_b) {
                out *= p.selectivity;
            }
        }
        out
    }

    /// Product of the selectivities of predicates with one end in `a` and the
    /// other in `b`. Returns 1.0 for a cross product.
    pub fn cross_selectivity(&self, a: RelSet, b: RelSet) -> f64 {
        self.predicates
            .iter()
            .filter(|p| {
                (a.contains(p.rel_a) && b.contains(p.rel_b))
                    || (a.contains(p.rel_b) && b.contains(p.rel_a))
            })
            .map(|p| p.selectivity)
            .product()
    }

    /// True when some predicate connects `a` and `b`.
    pub fn joinable(&self, a: RelSet, b: RelSet) -> bool {
        !self.neighborhood(a).intersect(b).is_empty()
    }

    /// True when the subgraph induced by `set` is connected.
    pub fn is_connected_set(&self, set: RelSet) -> bool {
        let Some(start) = set.first() else {
            return false;
        };
        let mut seen = RelSet::single(start);
        let mut frontier = seen;
        while !frontier.is_empty() {
            let next = self.neighborhood(frontier).intersect(set).minus(seen);
            seen = seen.union(next);
            frontier = next;
        }
        seen == set
    }

    pub fn is_connected(&self) -> bool {
        self.is_connected_set(self.all())
    }

    /// Connected components, each listed by ascending lowest member.
    pub fn components(&self) -> Vec<RelSet> {
        let mut rest = self.all();
        let mut out = Vec::new();
        while let Some(start) = rest.first() {
            let mut comp = RelSet::single(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let next = self.neighborhood(frontier).minus(comp);
                comp = comp.union(next);
                frontier = next;
            }
            rest = rest.minus(comp);
            out.push(comp);
        }
        out
    }

    /// A graph without cycles (a forest).
    pub fn is_acyclic(&self) -> bool {
        self.predicates.len() + self.components().len() == self.relations.len()
    }

    /// A connected acyclic graph.
    pub fn is_tree(&self) -> bool {
        self.is_connected() && self.predicates.len() + 1 == self.relations.len()
    }

    /// The subgraph induced by `set`, with relations renumbered in ascending
    /// order of their original ids. Returns the subgraph and the mapping from
    /// new ids back to ids in `self`.
    pub fn induced_subgraph(&self, set: RelSet) -> Result<(QueryGraph, Vec<RelId>)> {
        if set.is_empty() || !set.is_subset(self.all()) {
            return Err(Error::InvalidArgument(format!(
                "cannot induce a subgraph on {set:?}"
            )));
        }
        let mapping: Vec<RelId> = set.iter().collect();
        let mut local = vec![usize::MAX; self.relations.len()];
        for (new, &old) in mapping.iter().enumerate() {
            local[old] = new;
        }
        let relations = mapping
            .iter()
            .enumerate()
            .map(|(new, &old)| Relation {
                id: new,
                name: self.relations[old].name.clone(),
                cardinality: self.relations[old].cardinality,
            })
            .collect();
        let predicates = self
            .predicates
            .iter()
            .filter(|p| set.contains(p.rel_a) && set.contains(p.rel_b))
            .map(|p| Predicate {
                rel_a: local[p.rel_a],
                rel_b: local[p.rel_b],
                selectivity: p.selectivity,
            })
            .collect();
        Ok((QueryGraph::new(relations, predicates)?, mapping))
    }
}

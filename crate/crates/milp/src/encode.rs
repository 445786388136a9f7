use joinopt_core::{JoinTree, QueryGraph, RelSet};

use crate::error::{MilpError, Result};
use crate::model::{MilpModel, Sense, VarKind};
use crate::template::JoinTemplate;
use crate::thresholds::Thresholds;

/// How threshold indicators are weighted in the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    /// `θ_t - θ_{t-1}`: a join reaching level `t` is charged exactly `θ_t`.
    #[default]
    Incremental,
    /// `θ_t`: every level a join reaches is charged in full.
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EncodeOptions {
    pub weighting: Weighting,
    /// Also charge the root slot. Its output is the same for every plan.
    pub cost_root: bool,
}

pub fn ja(slot: usize) -> String {
    format!("ja_{slot}")
}

pub fn nap(slot: usize) -> String {
    format!("nap_{slot}")
}

pub fn roj(rel: usize, slot: usize) -> String {
    format!("roj_{rel}_{slot}")
}

pub fn pao(pred: usize, slot: usize) -> String {
    format!("pao_{pred}_{slot}")
}

pub fn trj(threshold: usize, slot: usize) -> String {
    format!("trj_{threshold}_{slot}")
}

fn costed(template: &JoinTemplate, slot: usize, options: &EncodeOptions) -> bool {
    options.cost_root || slot != template.root()
}

/// Encodes `graph` over `template` with incremental weights and the root
/// excluded from the objective.
pub fn encode(
    graph: &QueryGraph,
    template: &JoinTemplate,
    thresholds: &Thresholds,
) -> Result<MilpModel> {
    encode_with(graph, template, thresholds, &EncodeOptions::default())
}

pub fn encode_with(
    graph: &QueryGraph,
    template: &JoinTemplate,
    thresholds: &Thresholds,
    options: &EncodeOptions,
) -> Result<MilpModel> {
    let n_rel = graph.n_relations();
    if n_rel < 2 {
        return Err(MilpError::InvalidArgument(
            "at least two relations are required".into(),
        ));
    }
    let required = n_rel - 1;
    if template.capacity() < required {
        return Err(MilpError::TemplateTooSmall {
            capacity: template.capacity(),
            required,
        });
    }
    let preds = graph.predicates();
    let mut m = MilpModel::new();

    for s in 0..template.len() {
        m.add_binary(ja(s))?;
        if let Some(p_max) = template.p_max(s) {
            m.add_variable(nap(s), VarKind::Integer, 0.0, p_max as f64)?;
        }
        for r in 0..n_rel {
            m.add_binary(roj(r, s))?;
        }
        for p in 0..preds.len() {
            m.add_binary(pao(p, s))?;
        }
        if costed(template, s, options) {
            for t in 0..thresholds.len() {
                m.add_binary(trj(t, s))?;
            }
        }
    }
    let v = |m: &MilpModel, name: String| m.var(&name).expect("declared above");

    // (A) number of active joins
    let mut terms: Vec<(usize, f64)> = (0..template.len()).map(|s| (v(&m, ja(s)), 1.0)).collect();
    terms.extend(template.anchors().map(|s| (v(&m, nap(s)), 1.0)));
    m.add_constraint("A", terms, Sense::Eq, required as f64)?;

    // (B) an active slot's parent is active; (B') anchor predecessors need an active anchor
    for s in 0..template.len() {
        for &c in template.children(s) {
            let t = vec![(v(&m, ja(c)), 1.0), (v(&m, ja(s)), -1.0)];
            m.add_constraint(format!("B_{c}"), t, Sense::Le, 0.0)?;
        }
    }
    for a in template.anchors().collect::<Vec<_>>() {
        let p_max = template.p_max(a).unwrap() as f64;
        let t = vec![(v(&m, nap(a)), 1.0), (v(&m, ja(a)), -p_max)];
        m.add_constraint(format!("Bp_{a}"), t, Sense::Le, 0.0)?;
    }

    // (C) operand count: two per active join in the subtree plus one per further join below
    for s in 0..template.len() {
        let mut t: Vec<(usize, f64)> = (0..n_rel).map(|r| (v(&m, roj(r, s)), 1.0)).collect();
        t.push((v(&m, ja(s)), -2.0));
        for d in template.subtree(s) {
            if d != s {
                t.push((v(&m, ja(d)), -1.0));
            }
            if template.is_anchor(d) {
                t.push((v(&m, nap(d)), -1.0));
            }
        }
        let name = if template.is_anchor(s) {
            format!("Cp_{s}")
        } else {
            format!("C_{s}")
        };
        m.add_constraint(name, t, Sense::Eq, 0.0)?;
    }

    // (D) operands flow to the parent
    for s in 0..template.len() {
        if let Some(p) = template.parent(s) {
            for r in 0..n_rel {
                let t = vec![(v(&m, roj(r, s)), 1.0), (v(&m, roj(r, p)), -1.0)];
                m.add_constraint(format!("D_{r}_{s}"), t, Sense::Le, 0.0)?;
            }
        }
    }

    // (E) inactive slots have no operands
    for s in 0..template.len() {
        for r in 0..n_rel {
            let t = vec![(v(&m, roj(r, s)), 1.0), (v(&m, ja(s)), -1.0)];
            m.add_constraint(format!("E_{r}_{s}"), t, Sense::Le, 0.0)?;
        }
    }

    // (F) siblings do not share operands
    for s in 0..template.len() {
        let ch = template.children(s);
        for (i, &a) in ch.iter().enumerate() {
            for &b in &ch[i + 1..] {
                for r in 0..n_rel {
                    let t = vec![(v(&m, roj(r, a)), 1.0), (v(&m, roj(r, b)), 1.0)];
                    m.add_constraint(format!("F_{r}_{a}_{b}"), t, Sense::Le, 1.0)?;
                }
            }
        }
    }

    // (G) a predicate applies only where both its relations are operands
    for s in 0..template.len() {
        for (p, pred) in preds.iter().enumerate() {
            for (k, rel) in [(1, pred.rel_a), (2, pred.rel_b)] {
                let t = vec![(v(&m, pao(p, s)), 1.0), (v(&m, roj(rel, s)), -1.0)];
                m.add_constraint(format!("G{k}_{p}_{s}"), t, Sense::Le, 0.0)?;
            }
        }
    }

    // (H) threshold indicators, in log2 space with a big-M release
    let log_card: Vec<f64> = (0..n_rel).map(|r| graph.cardinality(r).log2()).collect();
    let big_m: f64 = (0..n_rel)
        .map(|r| graph.cardinality(r).max(2.0).log2())
        .sum::<f64>()
        + 1.0;
    for s in 0..template.len() {
        if !costed(template, s, options) {
            continue;
        }
        for (t, &theta) in thresholds.values().iter().enumerate() {
            let log_theta = theta.log2();
            let mut terms: Vec<(usize, f64)> = (0..n_rel)
                .map(|r| (v(&m, roj(r, s)), log_card[r]))
                .collect();
            terms.extend(
                preds
                    .iter()
                    .enumerate()
                    .map(|(p, pr)| (v(&m, pao(p, s)), pr.selectivity.log2())),
            );
            terms.push((v(&m, trj(t, s)), -(big_m + (-log_theta).max(0.0))));
            m.add_constraint(format!("H_{t}_{s}"), terms, Sense::Le, log_theta)?;
        }
    }

    let weights = match options.weighting {
        Weighting::Incremental => thresholds.increments(),
        Weighting::Absolute => thresholds.values().to_vec(),
    };
    let mut objective = Vec::new();
    for s in 0..template.len() {
        if costed(template, s, options) {
            for (t, &w) in weights.iter().enumerate() {
                objective.push((v(&m, trj(t, s)), w));
            }
        }
    }
    m.set_objective(objective)?;
    Ok(m)
}

/// Places every join of `tree` on a template slot (anchors may absorb whole
/// subtrees) and returns the matching assignment with predicates applied
/// wherever possible and the fewest threshold indicators set. `None` when the
/// tree does not fit the template.
pub fn assignment_for_tree(
    model: &MilpModel,
    graph: &QueryGraph,
    template: &JoinTemplate,
    tree: &JoinTree,
) -> Result<Option<Vec<f64>>> {
    if tree.is_leaf() {
        return Err(MilpError::InvalidArgument(
            "a single relation has no joins to place".into(),
        ));
    }
    let Some(placed) = embed(template, tree, template.root()) else {
        return Ok(None);
    };
    let mut values = vec![0.0; model.n_variables()];
    let set = |values: &mut Vec<f64>, name: String, x: f64| -> Result<()> {
        let i = model.var(&name).ok_or(MilpError::UnknownVariable(name))?;
        values[i] = x;
        Ok(())
    };
    for &(slot, rels, extra) in &placed {
        set(&mut values, ja(slot), 1.0)?;
        if template.is_anchor(slot) {
            set(&mut values, nap(slot), extra as f64)?;
        }
        for r in rels.iter() {
            set(&mut values, roj(r, slot), 1.0)?;
        }
        for (p, pred) in graph.predicates().iter().enumerate() {
            if pred.endpoints().is_subset(rels) {
                set(&mut values, pao(p, slot), 1.0)?;
            }
        }
    }
    for c in model.constraints() {
        if c.name.starts_with("H_") && !c.is_satisfied(&values, 1e-9) {
            let ind = c
                .terms
                .last()
                .expect("threshold rows end with the indicator")
                .0;
            values[ind] = 1.0;
        }
    }
    Ok(Some(values))
}

fn embed(
    template: &JoinTemplate,
    node: &JoinTree,
    slot: usize,
) -> Option<Vec<(usize, RelSet, usize)>> {
    let joins = node.n_joins();
    if let Some(p_max) = template.p_max(slot) {
        return (joins - 1 <= p_max).then(|| vec![(slot, node.relset(), joins - 1)]);
    }
    let JoinTree::Join(l, r) = node else {
        return None;
    };
    let inner: Vec<&JoinTree> = [l.as_ref(), r.as_ref()]
        .into_iter()
        .filter(|c| !c.is_leaf())
        .collect();
    let slots = template.children(slot);
    let here = (slot, node.relset(), 0);
    match inner.len() {
        0 => Some(vec![here]),
        1 => slots
            .iter()
            .find_map(|&s| embed(template, inner[0], s))
            .map(|mut v| {
                v.insert(0, here);
                v
            }),
        _ if slots.len() == 2 => [(0, 1), (1, 0)].iter().find_map(|&(a, b)| {
            let mut v = vec![here];
            v.extend(embed(template, inner[0], slots[a])?);
            v.extend(embed(template, inner[1], slots[b])?);
            Some(v)
        }),
        _ => None,
    }
}

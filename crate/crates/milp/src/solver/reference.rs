use std::collections::VecDeque;
use std::time::{Duration, Instant};

use crate::error::{MilpError, Result};
use crate::model::{MilpModel, Sense};
use crate::solver::{or_error, Assignment, Incumbent, MilpSolver, SolveStatus};

pub const DEFAULT_NODE_LIMIT: u64 = 1 << 24;

/// Depth-first branch and bound with bound propagation on every node.
/// Optimal (or a proof of infeasibility) whenever it finishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReferenceSolver {
    pub node_limit: u64,
    pub time_limit: Option<Duration>,
}

impl Default for ReferenceSolver {
    fn default() -> Self {
        Self {
            node_limit: DEFAULT_NODE_LIMIT,
            time_limit: None,
        }
    }
}

impl MilpSolver for ReferenceSolver {
    fn solve(&self, model: &MilpModel) -> Assignment {
        let start = Instant::now();
        or_error(
            search_optimum(model, self.node_limit, self.time_limit),
            start.elapsed(),
        )
    }

    fn describe(&self) -> String {
        format!("reference search (node limit {})", self.node_limit)
    }
}

/// Minimizes `model` exhaustively. Refuses with [`MilpError::GuardExceeded`]
/// once more than `node_limit` search nodes would be needed.
pub fn solve_reference(model: &MilpModel, node_limit: u64) -> Result<Assignment> {
    search_optimum(model, node_limit, None)
}

/// Every distinct assignment of the `project` variables that extends to a
/// feasible solution, each returned with one such extension.
pub fn enumerate_feasible(
    model: &MilpModel,
    project: &[usize],
    node_limit: u64,
) -> Result<Vec<Vec<f64>>> {
    if project.iter().any(|&v| v >= model.n_variables()) {
        return Err(MilpError::InvalidArgument(
            "projection references an undeclared variable".into(),
        ));
    }
    let mut s = Search::new(model, node_limit, None);
    let mut found = Vec::new();
    if !s.propagate_all() {
        return Ok(found);
    }
    let rest: Vec<usize> = (0..model.n_variables())
        .filter(|v| !project.contains(v))
        .collect();
    s.dfs(project, 0, &mut |s: &mut Search| {
        let mut completion = None;
        s.dfs(&rest, 0, &mut |s: &mut Search| {
            completion = Some(s.values());
            Ok(true)
        })?;
        found.extend(completion);
        Ok(false)
    })?;
    Ok(found)
}

fn search_optimum(
    model: &MilpModel,
    node_limit: u64,
    time_limit: Option<Duration>,
) -> Result<Assignment> {
    let start = Instant::now();
    let mut s = Search::new(model, node_limit, time_limit.map(|d| start + d));
    s.bounding = true;
    // structural variables first; costed ones are then mostly forced
    let mut order: Vec<usize> = (0..model.n_variables()).collect();
    order.sort_by_key(|&v| s.objective[v] != 0.0);
    let mut best: Option<Vec<f64>> = None;
    let mut incumbents = Vec::new();
    let mut timed_out = false;
    if s.propagate_all() {
        let outcome = s.dfs(&order, 0, &mut |s: &mut Search| {
            let values = s.values();
            let obj = model.evaluate_objective(&values);
            s.best = Some(obj);
            incumbents.push(Incumbent {
                time: start.elapsed(),
                objective: obj,
            });
            best = Some(values);
            Ok(false)
        });
        match outcome {
            Ok(_) => {}
            Err(MilpError::Solver(_)) => timed_out = true,
            Err(e) => return Err(e),
        }
    }
    let status = match (&best, timed_out) {
        (Some(_), false) => SolveStatus::Optimal,
        (Some(_), true) => SolveStatus::Feasible,
        (None, false) => SolveStatus::Infeasible,
        (None, true) => SolveStatus::Timeout,
    };
    Ok(Assignment {
        status,
        objective: best.as_ref().map(|v| model.evaluate_objective(v)),
        values: best,
        message: Some(format!("{} nodes", s.nodes)),
        incumbents,
        wall_time: start.elapsed(),
    })
}

/// A `≤` row; equalities and `≥` rows are normalized into one or two of these.
struct Row {
    terms: Vec<(usize, f64)>,
    rhs: f64,
    tol: f64,
}

struct Search {
    lo: Vec<i64>,
    hi: Vec<i64>,
    rows: Vec<Row>,
    occurs: Vec<Vec<usize>>,
    objective: Vec<f64>,
    trail: Vec<(usize, i64, i64)>,
    queued: Vec<bool>,
    nodes: u64,
    node_limit: u64,
    deadline: Option<Instant>,
    bounding: bool,
    best: Option<f64>,
}

impl Search {
    fn new(model: &MilpModel, node_limit: u64, deadline: Option<Instant>) -> Self {
        let n = model.n_variables();
        let mut rows = Vec::new();
        for c in model.constraints() {
            let tol = 1e-9 * (1.0 + c.rhs.abs());
            let neg = |terms: &[(usize, f64)]| terms.iter().map(|&(v, a)| (v, -a)).collect();
            if c.sense != Sense::Ge {
                rows.push(Row {
                    terms: c.terms.clone(),
                    rhs: c.rhs,
                    tol,
                });
            }
            if c.sense != Sense::Le {
                rows.push(Row {
                    terms: neg(&c.terms),
                    rhs: -c.rhs,
                    tol,
                });
            }
        }
        let mut occurs = vec![Vec::new(); n];
        for (i, r) in rows.iter().enumerate() {
            for &(v, a) in &r.terms {
                if a != 0.0 && occurs[v].last() != Some(&i) {
                    occurs[v].push(i);
                }
            }
        }
        let mut objective = vec![0.0; n];
        for &(v, a) in model.objective() {
            objective[v] += a;
        }
        Self {
            lo: model.variables().iter().map(|v| v.lower as i64).collect(),
            hi: model.variables().iter().map(|v| v.upper as i64).collect(),
            queued: vec![false; rows.len()],
            rows,
            occurs,
            objective,
            trail: Vec::new(),
            nodes: 0,
            node_limit,
            deadline,
            bounding: false,
            best: None,
        }
    }

    fn values(&self) -> Vec<f64> {
        self.lo.iter().map(|&x| x as f64).collect()
    }

    fn set(&mut self, v: usize, lo: i64, hi: i64) {
        self.trail.push((v, self.lo[v], self.hi[v]));
        self.lo[v] = lo;
        self.hi[v] = hi;
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, lo, hi) = self.trail.pop().unwrap();
            self.lo[v] = lo;
            self.hi[v] = hi;
        }
    }

    fn propagate_all(&mut self) -> bool {
        let all: Vec<usize> = (0..self.rows.len()).collect();
        self.propagate(all)
    }

    /// Tightens bounds until a fixpoint; false on a proven conflict.
    fn propagate(&mut self, start: Vec<usize>) -> bool {
        let mut queue: VecDeque<usize> = VecDeque::new();
        for r in start {
            if !self.queued[r] {
                self.queued[r] = true;
                queue.push_back(r);
            }
        }
        let mut ok = true;
        while let Some(r) = queue.pop_front() {
            self.queued[r] = false;
            if !ok {
                continue;
            }
            let row = &self.rows[r];
            let min_act: f64 = row
                .terms
                .iter()
                .map(|&(v, a)| {
                    if a > 0.0 {
                        a * self.lo[v] as f64
                    } else {
                        a * self.hi[v] as f64
                    }
                })
                .sum();
            if min_act > row.rhs + row.tol {
                ok = false;
                continue;
            }
            let mut changes = Vec::new();
            for &(v, a) in &row.terms {
                if a == 0.0 || self.lo[v] == self.hi[v] {
                    continue;
                }
                let own = if a > 0.0 {
                    a * self.lo[v] as f64
                } else {
                    a * self.hi[v] as f64
                };
                let slack = row.rhs + row.tol - (min_act - own);
                if a > 0.0 {
                    let bound = (slack / a).floor() as i64;
                    if bound < self.hi[v] {
                        changes.push((v, self.lo[v], bound));
                    }
                } else {
                    let bound = (slack / a).ceil() as i64;
                    if bound > self.lo[v] {
                        changes.push((v, bound, self.hi[v]));
                    }
                }
            }
            for (v, lo, hi) in changes {
                let (lo, hi) = (lo.max(self.lo[v]), hi.min(self.hi[v]));
                if lo > hi {
                    ok = false;
                    break;
                }
                self.set(v, lo, hi);
                for i in 0..self.occurs[v].len() {
                    let o = self.occurs[v][i];
                    if !self.queued[o] {
                        self.queued[o] = true;
                        queue.push_back(o);
                    }
                }
            }
        }
        ok
    }

    fn lower_bound(&self) -> f64 {
        self.objective
            .iter()
            .enumerate()
            .map(|(v, &c)| {
                if c > 0.0 {
                    c * self.lo[v] as f64
                } else {
                    c * self.hi[v] as f64
                }
            })
            .sum()
    }

    /// True when `v` at its lower bound satisfies every row it occurs in for
    /// any completion, and raising it cannot lower the objective.
    fn dominated_upward(&self, v: usize) -> bool {
        self.objective[v] >= 0.0
            && self.occurs[v]
                .iter()
                .all(|&r| self.row_safe_with(r, v, self.lo[v]))
    }

    fn dominated_downward(&self, v: usize) -> bool {
        self.occurs[v]
            .iter()
            .all(|&r| self.row_safe_with(r, v, self.hi[v]))
    }

    /// Whether row `r` holds for every completion once `v` is fixed to `x`.
    fn row_safe_with(&self, r: usize, v: usize, x: i64) -> bool {
        let row = &self.rows[r];
        let max_act: f64 = row
            .terms
            .iter()
            .map(|&(u, a)| {
                if u == v {
                    a * x as f64
                } else if a > 0.0 {
                    a * self.hi[u] as f64
                } else {
                    a * self.lo[u] as f64
                }
            })
            .sum();
        max_act <= row.rhs + row.tol
    }

    /// Branches over `order[pos..]`; `leaf` runs once all of `order` is
    /// fixed and returns true to stop the search.
    fn dfs(
        &mut self,
        order: &[usize],
        pos: usize,
        leaf: &mut dyn FnMut(&mut Search) -> Result<bool>,
    ) -> Result<bool> {
        self.nodes += 1;
        if self.nodes > self.node_limit {
            return Err(MilpError::GuardExceeded {
                limit: self.node_limit,
            });
        }
        if self.nodes.is_multiple_of(1024) && self.deadline.is_some_and(|d| Instant::now() >= d) {
            return Err(MilpError::Solver("time limit reached".into()));
        }
        if self.bounding {
            if let Some(best) = self.best {
                if self.lower_bound() >= best - 1e-9 * (1.0 + best.abs()) {
                    return Ok(false);
                }
            }
        }
        let mut pos = pos;
        while pos < order.len() && self.lo[order[pos]] == self.hi[order[pos]] {
            pos += 1;
        }
        if pos == order.len() {
            return leaf(self);
        }
        let v = order[pos];
        let (lo, hi) = (self.lo[v], self.hi[v]);
        let ascending = self.objective[v] > 0.0;
        let candidates: Vec<i64> = if self.bounding && self.dominated_upward(v) {
            vec![lo]
        } else if self.bounding && self.objective[v] <= 0.0 && self.dominated_downward(v) {
            vec![hi]
        } else if ascending {
            (lo..=hi).collect()
        } else {
            (lo..=hi).rev().collect()
        };
        for x in candidates {
            let mark = self.trail.len();
            self.set(v, x, x);
            let rows = self.occurs[v].clone();
            let stop = if self.propagate(rows) {
                self.dfs(order, pos + 1, leaf)?
            } else {
                false
            };
            self.undo(mark);
            if stop {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::VarKind;

    #[test]
    fn empty_model_minimizes_single_binary() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        m.set_objective(vec![(x, 1.0)]).unwrap();
        let a = solve_reference(&m, 100).unwrap();
        assert_eq!(a.status, SolveStatus::Optimal);
        assert_eq!(a.objective, Some(0.0));
    }

    #[test]
    fn infeasible_toy_model() {
        let mut m = MilpModel::new();
        let x = m.add_binary("x").unwrap();
        m.add_constraint("up", vec![(x, 1.0)], Sense::Le, 0.0)
            .unwrap();
        m.add_constraint("down", vec![(x, 1.0)], Sense::Ge, 1.0)
            .unwrap();
        assert_eq!(
            solve_reference(&m, 100).unwrap().status,
            SolveStatus::Infeasible
        );
    }

    #[test]
    fn knapsack_matches_enumeration() {
        // maximize value under a weight budget, as a minimization
        let w = [3.0, 4.0, 5.0, 9.0, 2.0, 7.0];
        let val = [4.0, 5.0, 7.0, 11.0, 1.0, 9.0];
        let mut m = MilpModel::new();
        let xs: Vec<usize> = (0..6)
            .map(|i| m.add_binary(format!("x{i}")).unwrap())
            .collect();
        let k = m.add_variable("k", VarKind::Integer, 0.0, 3.0).unwrap();
        let mut row: Vec<(usize, f64)> = xs.iter().zip(w).map(|(&x, w)| (x, w)).collect();
        row.push((k, 1.0));
        m.add_constraint("cap", row, Sense::Le, 17.0).unwrap();
        let mut obj: Vec<(usize, f64)> = xs.iter().zip(val).map(|(&x, v)| (x, -v)).collect();
        obj.push((k, -0.5));
        m.set_objective(obj).unwrap();
        let mut best = f64::INFINITY;
        for mask in 0..64u32 {
            for kv in 0..=3 {
                let weight: f64 = (0..6)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| w[i])
                    .sum::<f64>()
                    + kv as f64;
                if weight <= 17.0 {
                    let o = -(0..6)
                        .filter(|i| mask >> i & 1 == 1)
                        .map(|i| val[i])
                        .sum::<f64>()
                        - 0.5 * kv as f64;
                    best = best.min(o);
                }
            }
        }
        let a = solve_reference(&m, 1_000_000).unwrap();
        assert_eq!(a.status, SolveStatus::Optimal);
        assert_eq!(a.objective, Some(best));
        assert!(m
            .first_violation(a.values.as_ref().unwrap(), 1e-9)
            .is_none());
    }

    #[test]
    fn guard_refuses_large_searches() {
        let mut m = MilpModel::new();
        let xs: Vec<usize> = (0..30)
            .map(|i| m.add_binary(format!("x{i}")).unwrap())
            .collect();
        m.add_constraint(
            "odd",
            xs.iter().map(|&x| (x, 2.0)).collect(),
            Sense::Eq,
            31.0,
        )
        .unwrap();
        assert!(matches!(
            solve_reference(&m, 1000),
            Err(MilpError::GuardExceeded { .. })
        ));
    }

    #[test]
    fn projected_enumeration() {
        let mut m = MilpModel::new();
        let a = m.add_binary("a").unwrap();
        let b = m.add_binary("b").unwrap();
        let c = m.add_binary("c").unwrap();
        m.add_constraint("one", vec![(a, 1.0), (b, 1.0)], Sense::Eq, 1.0)
            .unwrap();
        m.add_constraint("free", vec![(c, 1.0)], Sense::Le, 1.0)
            .unwrap();
        assert_eq!(enumerate_feasible(&m, &[a, b], 100).unwrap().len(), 2);
        assert_eq!(enumerate_feasible(&m, &[a, b, c], 100).unwrap().len(), 4);
    }
}

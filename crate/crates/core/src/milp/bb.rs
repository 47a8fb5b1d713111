//! Built-in backend: depth-first branch-and-bound over integer domains with
//! linear bounds propagation. No LP relaxation is solved; the node bound is
//! the objective evaluated at the cheapest end of every domain.

use std::time::{Duration, Instant};

use super::model::{LinearModel, Sense, SolveResult, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchLimits {
    pub time_limit: Option<Duration>,
    /// Keep searching past the time limit until a first incumbent exists.
    pub continue_until_feasible: bool,
    pub epsilon: f64,
}

impl Default for SearchLimits {
    fn default() -> Self {
        Self { time_limit: None, continue_until_feasible: false, epsilon: 1e-6 }
    }
}

/// `Σ coef·x ≤ rhs`
#[derive(Debug, Clone)]
struct Row {
    terms: Vec<(usize, i64)>,
    rhs: i64,
}

/// Objective rescaled to integers when every coefficient allows it.
fn integer_objective(objective: &[(usize, f64)]) -> Option<(Vec<(usize, i64)>, f64)> {
    let mut scale = 1.0;
    for _ in 0..7 {
        let ok = objective.iter().all(|&(_, c)| {
            let s = c * scale;
            (s - s.round()).abs() < 1e-9 && s.abs() < 1e12
        });
        if ok {
            let terms = objective.iter().map(|&(v, c)| (v, (c * scale).round() as i64)).collect();
            return Some((terms, scale));
        }
        scale *= 10.0;
    }
    None
}

struct Search<'a> {
    rows: Vec<Row>,
    var_rows: Vec<Vec<usize>>,
    lb: Vec<i64>,
    ub: Vec<i64>,
    trail: Vec<(usize, i64, i64)>,
    queue: Vec<usize>,
    queued: Vec<bool>,
    objective: &'a [(usize, f64)],
    /// Integer objective and the row index carrying `obj ≤ best - 1`.
    cutoff: Option<(Vec<(usize, i64)>, f64, usize)>,
    incumbent: Option<(f64, Vec<i64>)>,
    epsilon: f64,
    open_bound: f64,
    nodes: u64,
    start: Instant,
    limits: SearchLimits,
    stopped: bool,
}

impl<'a> Search<'a> {
    fn new(model: &'a LinearModel, limits: SearchLimits) -> Self {
        let n = model.var_count();
        let mut rows = Vec::new();
        for c in &model.constraints {
            let neg = || Row { terms: c.terms.iter().map(|&(v, a)| (v, -a)).collect(), rhs: -c.rhs };
            match c.sense {
                Sense::Le => rows.push(Row { terms: c.terms.clone(), rhs: c.rhs }),
                Sense::Ge => rows.push(neg()),
                Sense::Eq => {
                    rows.push(Row { terms: c.terms.clone(), rhs: c.rhs });
                    rows.push(neg());
                }
            }
        }
        let cutoff = integer_objective(&model.objective).map(|(terms, scale)| {
            rows.push(Row { terms: terms.clone(), rhs: i64::MAX / 4 });
            (terms, scale, rows.len() - 1)
        });
        let mut var_rows = vec![Vec::new(); n];
        for (r, row) in rows.iter().enumerate() {
            for &(v, _) in &row.terms {
                if var_rows[v].last() != Some(&r) {
                    var_rows[v].push(r);
                }
            }
        }
        let nrows = rows.len();
        Self {
            rows,
            var_rows,
            lb: model.variables.iter().map(|v| v.lower).collect(),
            ub: model.variables.iter().map(|v| v.upper).collect(),
            trail: Vec::new(),
            queue: Vec::new(),
            queued: vec![false; nrows],
            objective: &model.objective,
            cutoff,
            incumbent: None,
            epsilon: limits.epsilon,
            open_bound: f64::INFINITY,
            nodes: 0,
            start: Instant::now(),
            limits,
            stopped: false,
        }
    }

    fn enqueue(&mut self, r: usize) {
        if !self.queued[r] {
            self.queued[r] = true;
            self.queue.push(r);
        }
    }

    fn enqueue_var(&mut self, v: usize) {
        for i in 0..self.var_rows[v].len() {
            let r = self.var_rows[v][i];
            self.enqueue(r);
        }
    }

    fn set_bounds(&mut self, v: usize, lb: i64, ub: i64) {
        self.trail.push((v, self.lb[v], self.ub[v]));
        self.lb[v] = lb;
        self.ub[v] = ub;
        self.enqueue_var(v);
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let (v, lb, ub) = self.trail.pop().expect("trail entry");
            self.lb[v] = lb;
            self.ub[v] = ub;
        }
    }

    fn clear_queue(&mut self) {
        for r in self.queue.drain(..) {
            self.queued[r] = false;
        }
    }

    fn propagate(&mut self) -> bool {
        while let Some(r) = self.queue.pop() {
            self.queued[r] = false;
            let row = &self.rows[r];
            let mut minact: i64 = 0;
            for &(v, a) in &row.terms {
                minact += if a > 0 { a * self.lb[v] } else { a * self.ub[v] };
            }
            let slack = row.rhs - minact;
            if slack < 0 {
                self.clear_queue();
                return false;
            }
            let mut changes: Vec<(usize, i64, i64)> = Vec::new();
            for &(v, a) in &row.terms {
                let (lb, ub) = (self.lb[v], self.ub[v]);
                if a.abs() * (ub - lb) <= slack {
                    continue;
                }
                if a > 0 {
                    changes.push((v, lb, lb + slack / a));
                } else {
                    changes.push((v, ub - slack / -a, ub));
                }
            }
            for (v, lb, ub) in changes {
                self.set_bounds(v, lb.max(self.lb[v]), ub.min(self.ub[v]));
            }
        }
        true
    }

    fn bound(&self) -> f64 {
        self.objective
            .iter()
            .map(|&(v, c)| if c >= 0.0 { c * self.lb[v] as f64 } else { c * self.ub[v] as f64 })
            .sum()
    }

    fn prunes(&self, bound: f64) -> bool {
        match &self.incumbent {
            None => false,
            Some((best, _)) => match &self.cutoff {
                Some((_, scale, _)) => (bound * scale).round() > (best * scale).round() - 1.0,
                None => bound >= best - self.epsilon,
            },
        }
    }

    fn out_of_time(&self) -> bool {
        match self.limits.time_limit {
            Some(limit) if self.start.elapsed() >= limit => {
                !(self.limits.continue_until_feasible && self.incumbent.is_none())
            }
            _ => false,
        }
    }

    fn record(&mut self) {
        let values = self.lb.clone();
        let obj: f64 = self.objective.iter().map(|&(v, c)| c * values[v] as f64).sum();
        if let Some((terms, _, r)) = &self.cutoff {
            let scaled: i64 = terms.iter().map(|&(v, a)| a * values[v]).sum();
            self.rows[*r].rhs = scaled - 1;
            let r = *r;
            self.enqueue(r);
        }
        self.incumbent = Some((obj, values));
    }

    fn dfs(&mut self, first_free: usize) {
        self.nodes += 1;
        if self.nodes % 1024 == 0 && self.out_of_time() {
            self.stopped = true;
        }
        let bound = self.bound();
        if self.stopped {
            self.open_bound = self.open_bound.min(bound);
            return;
        }
        if self.prunes(bound) {
            return;
        }
        let Some(v) = (first_free..self.lb.len()).find(|&v| self.lb[v] < self.ub[v]) else {
            self.record();
            return;
        };
        let (lb, ub) = (self.lb[v], self.ub[v]);
        let mark = self.trail.len();
        self.set_bounds(v, lb, lb);
        if self.propagate() {
            self.dfs(v + 1);
        }
        self.undo(mark);
        if self.stopped {
            self.open_bound = self.open_bound.min(bound);
            return;
        }
        // A new incumbent may have tightened the cutoff row.
        if let Some((_, _, r)) = &self.cutoff {
            let r = *r;
            self.enqueue(r);
        }
        self.set_bounds(v, lb + 1, ub);
        if self.propagate() {
            self.dfs(v);
        }
        self.undo(mark);
    }
}

pub fn solve_builtin(model: &LinearModel, limits: SearchLimits) -> SolveResult {
    let mut search = Search::new(model, limits);
    for r in 0..search.rows.len() {
        search.enqueue(r);
    }
    let feasible_root = search.propagate();
    if feasible_root {
        search.dfs(0);
    }
    let runtime = search.start.elapsed();
    let nodes = search.nodes;
    match (search.incumbent, search.stopped) {
        (Some((obj, values)), false) => SolveResult {
            status: SolveStatus::Optimal,
            objective: obj,
            values,
            best_bound: obj,
            nodes,
            runtime,
        },
        (Some((obj, values)), true) => SolveResult {
            status: SolveStatus::Feasible,
            objective: obj,
            best_bound: search.open_bound.min(obj),
            values,
            nodes,
            runtime,
        },
        (None, false) => SolveResult {
            status: SolveStatus::Infeasible,
            objective: f64::INFINITY,
            values: Vec::new(),
            best_bound: f64::INFINITY,
            nodes,
            runtime,
        },
        (None, true) => SolveResult {
            status: SolveStatus::TimeLimit,
            objective: f64::INFINITY,
            values: Vec::new(),
            best_bound: search.open_bound,
            nodes,
            runtime,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::milp::model::VarKind;

    #[test]
    fn knapsack_like() {
        // min -3a - 2b - 4c  s.t. 2a + b + 3c <= 4, binaries
        let mut m = LinearModel::new();
        let a = m.binary("a");
        let b = m.binary("b");
        let c = m.binary("c");
        m.add_constraint("cap", vec![(a, 2), (b, 1), (c, 3)], Sense::Le, 4);
        m.set_objective(vec![(a, -3.0), (b, -2.0), (c, -4.0)]);
        let r = solve_builtin(&m, SearchLimits::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.objective, -6.0);
        assert!(m.check(&r.values).is_ok());
    }

    #[test]
    fn integer_equality() {
        // min x + y  s.t. 3x + 5y = 14, x,y in [0,10]
        let mut m = LinearModel::new();
        let x = m.add_var("x", VarKind::Integer, 0, 10);
        let y = m.add_var("y", VarKind::Integer, 0, 10);
        m.add_constraint("e", vec![(x, 3), (y, 5)], Sense::Eq, 14);
        m.set_objective(vec![(x, 1.0), (y, 1.0)]);
        let r = solve_builtin(&m, SearchLimits::default());
        assert_eq!(r.status, SolveStatus::Optimal);
        assert_eq!(r.values, vec![3, 1]);
    }

    #[test]
    fn infeasible_model() {
        let mut m = LinearModel::new();
        let x = m.integer("x", 0, 3);
        let y = m.integer("y", 0, 3);
        m.add_constraint("lo", vec![(x, 1), (y, 1)], Sense::Ge, 5);
        m.add_constraint("hi", vec![(x, 1), (y, 1)], Sense::Le, 4);
        let r = solve_builtin(&m, SearchLimits::default());
        assert_eq!(r.status, SolveStatus::Infeasible);
    }

    #[test]
    fn fractional_objective_without_scaling() {
        let mut m = LinearModel::new();
        let x = m.integer("x", 1, 4);
        m.set_objective(vec![(x, std::f64::consts::PI)]);
        let r = solve_builtin(&m, SearchLimits::default());
        assert_eq!(r.values, vec![1]);
    }

    #[test]
    fn scaling_detects_decimal_objectives() {
        let (terms, scale) = integer_objective(&[(0, 0.5), (1, 1.25)]).unwrap();
        assert_eq!(scale, 100.0);
        assert_eq!(terms, vec![(0, 50), (1, 125)]);
        assert!(integer_objective(&[(0, std::f64::consts::E)]).is_none());
    }
}

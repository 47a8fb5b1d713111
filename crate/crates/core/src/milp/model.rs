//! Solver-agnostic integer linear model.

use std::fmt;
use std::time::Duration;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Integer,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lower: i64,
    pub upper: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
    Ge,
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::Le => "<=",
            Sense::Eq => "=",
            Sense::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

impl Constraint {
    pub fn is_satisfied(&self, values: &[i64]) -> bool {
        let lhs: i64 = self.terms.iter().map(|&(v, a)| a * values[v]).sum();
        match self.sense {
            Sense::Le => lhs <= self.rhs,
            Sense::Eq => lhs == self.rhs,
            Sense::Ge => lhs >= self.rhs,
        }
    }
}

/// Minimization model with integer coefficients and a real objective.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearModel {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
    pub objective: Vec<(usize, f64)>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lower: i64, upper: i64) -> usize {
        let (lower, upper) = match kind {
            VarKind::Binary => (lower.max(0), upper.min(1)),
            VarKind::Integer => (lower, upper),
        };
        self.variables.push(Variable { name: name.into(), kind, lower, upper });
        self.variables.len() - 1
    }

    pub fn binary(&mut self, name: impl Into<String>) -> usize {
        self.add_var(name, VarKind::Binary, 0, 1)
    }

    pub fn integer(&mut self, name: impl Into<String>, lower: i64, upper: i64) -> usize {
        self.add_var(name, VarKind::Integer, lower, upper)
    }

    pub fn add_constraint(&mut self, name: impl Into<String>, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) {
        debug_assert!(terms.iter().all(|&(v, _)| v < self.variables.len()));
        self.constraints.push(Constraint { name: name.into(), terms, sense, rhs });
    }

    pub fn set_objective(&mut self, terms: Vec<(usize, f64)>) {
        self.objective = terms;
    }

    pub fn add_objective_term(&mut self, var: usize, coef: f64) {
        self.objective.push((var, coef));
    }

    pub fn var_count(&self) -> usize {
        self.variables.len()
    }

    pub fn objective_value(&self, values: &[i64]) -> f64 {
        self.objective.iter().map(|&(v, c)| c * values[v] as f64).sum()
    }

    /// Index of the first violated constraint or out-of-bounds variable.
    pub fn check(&self, values: &[i64]) -> Result<(), String> {
        if values.len() != self.variables.len() {
            return Err("assignment length mismatch".into());
        }
        for (v, x) in self.variables.iter().zip(values) {
            if *x < v.lower || *x > v.upper {
                return Err(format!("variable {} = {x} outside [{}, {}]", v.name, v.lower, v.upper));
            }
        }
        match self.constraints.iter().find(|c| !c.is_satisfied(values)) {
            Some(c) => Err(format!("constraint {} violated", c.name)),
            None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    Feasible,
    Infeasible,
    TimeLimit,
}

impl SolveStatus {
    pub fn has_solution(self) -> bool {
        matches!(self, SolveStatus::Optimal | SolveStatus::Feasible)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::Feasible => "feasible",
            SolveStatus::Infeasible => "infeasible",
            SolveStatus::TimeLimit => "time_limit",
        }
    }
}

impl fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Feasible` means an incumbent exists but the search stopped early;
/// `TimeLimit` means it stopped early without one.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub objective: f64,
    pub values: Vec<i64>,
    pub best_bound: f64,
    pub nodes: u64,
    pub runtime: Duration,
}

impl SolveResult {
    pub fn gap(&self) -> f64 {
        if self.status.has_solution() {
            (self.objective - self.best_bound).max(0.0)
        } else {
            f64::INFINITY
        }
    }

    pub fn value(&self, var: usize) -> i64 {
        self.values[var]
    }
}

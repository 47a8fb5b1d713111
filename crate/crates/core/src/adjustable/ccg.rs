//! Column-and-constraint generation for MA and LA.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::graph::{Graph, Path};
use crate::milp::{solve_with, SolveStatus, SolverConfig};
use crate::robust::DiscreteUncertaintySet;

use super::master::{build_master, extract_first_stage, make_cut, Cut, FirstStage};
use super::sub::{solve_subproblem, SubOutcome};
use super::{adjustable_kbar, presolve_lower_bound, AdjustableResult, Formulation};

#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub lb: f64,
    /// Running minimum.
    pub ub: f64,
    /// `Y + max_ξ Σ w^ξ` of this iteration's first stage; `None` after a cut.
    pub raw_ub: Option<f64>,
    pub worst: Option<usize>,
    pub infeasible: Option<usize>,
    pub master_status: SolveStatus,
    pub elapsed: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcgState {
    pub lb: f64,
    pub ub: f64,
    pub iteration: usize,
    /// Scenario indices in the master, in insertion order.
    pub active: Vec<usize>,
    pub incumbent: Option<FirstStage>,
    pub cuts: Vec<Cut>,
    pub log: Vec<IterationRecord>,
}

impl CcgState {
    fn new(lb: f64) -> Self {
        Self { lb, ub: f64::INFINITY, iteration: 0, active: vec![0], incumbent: None, cuts: Vec::new(), log: Vec::new() }
    }

    pub fn gap(&self) -> f64 {
        self.ub - self.lb
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CcgOutcome {
    pub result: AdjustableResult,
    pub state: CcgState,
}

fn remaining(start: Instant, total: Option<Duration>) -> Option<Duration> {
    total.map(|t| t.saturating_sub(start.elapsed()))
}

/// Alternates master and sub-problems until the bounds meet. Stops early with
/// status `TimeLimit` when the total budget runs out after an incumbent was
/// found; without an incumbent that is an error.
pub fn ccg_solve(formulation: Formulation, graph: &Graph, set: &DiscreteUncertaintySet, config: &SolverConfig) -> Result<CcgOutcome> {
    if formulation == Formulation::Naive {
        return Err(Error::InvalidConfig("the naive method does not use column-and-constraint generation".into()));
    }
    if set.scenarios.is_empty() {
        return Err(Error::InvalidConfig("the scenario set is empty".into()));
    }
    config.validate()?;
    let start = Instant::now();
    let presolve = presolve_lower_bound(formulation, graph, set)?;
    let mut config = config.clone();
    if config.kbar.is_none() {
        config.kbar = Some(adjustable_kbar(formulation, graph, set)?.max(presolve).max(1));
    }
    let mut state = CcgState::new(presolve as f64);
    let mut best: Option<SubOutcome> = None;
    let mut status = SolveStatus::Optimal;

    loop {
        let left = remaining(start, config.time_limit_total);
        if left == Some(Duration::ZERO) {
            status = SolveStatus::TimeLimit;
            break;
        }
        state.iteration += 1;
        let subset: Vec<_> = state.active.iter().map(|&i| set.scenarios[i].clone()).collect();
        let (model, vars) = build_master(formulation, graph, &subset, &state.cuts, &config)?;
        let master_limit = match (config.time_limit_master, left) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        let mut limits = config.limits(master_limit);
        limits.continue_until_feasible = true;
        let master = solve_with(&model, &config, limits)?;
        match master.status {
            SolveStatus::Infeasible => return Err(Error::Infeasible),
            SolveStatus::TimeLimit => return Err(Error::TimeLimit),
            SolveStatus::Optimal => state.lb = state.lb.max(master.objective),
            SolveStatus::Feasible => state.lb = state.lb.max(master.best_bound.ceil()),
        }
        let first = extract_first_stage(formulation, graph, &vars, &master)?;
        let mut record = IterationRecord {
            iteration: state.iteration,
            lb: state.lb,
            ub: state.ub,
            raw_ub: None,
            worst: None,
            infeasible: None,
            master_status: master.status,
            elapsed: Duration::ZERO,
        };
        let next = match solve_subproblem(graph, &first, set, &config) {
            Ok(outcome) => {
                let raw = (first.path_count() as u64 + outcome.value) as f64;
                record.raw_ub = Some(raw);
                record.worst = Some(outcome.worst);
                let next = outcome.worst;
                if raw < state.ub {
                    state.ub = raw;
                    state.incumbent = Some(first);
                    best = Some(outcome);
                }
                next
            }
            Err(Error::InfeasibleAt { index }) => {
                record.infeasible = Some(index);
                state.cuts.push(make_cut(&first));
                index
            }
            Err(e) => return Err(e),
        };
        record.ub = state.ub;
        record.elapsed = start.elapsed();
        state.log.push(record);
        if state.gap() <= config.epsilon {
            break;
        }
        if state.active.contains(&next) {
            // Only possible when a master or sub-problem stopped early.
            status = SolveStatus::Feasible;
            break;
        }
        state.active.push(next);
    }

    let (Some(first), Some(outcome)) = (state.incumbent.clone(), best) else {
        return Err(Error::TimeLimit);
    };
    if status == SolveStatus::Optimal && !outcome.proven() {
        status = SolveStatus::Feasible;
    }
    let result = assemble(formulation, &first, outcome, status);
    Ok(CcgOutcome { result, state })
}

fn assemble(formulation: Formulation, first: &FirstStage, outcome: SubOutcome, status: SolveStatus) -> AdjustableResult {
    let shared_paths: Vec<Path> = match first {
        FirstStage::La { paths, .. } => paths.clone(),
        FirstStage::Ma { .. } => Vec::new(),
    };
    let path_count = first.path_count();
    AdjustableResult {
        formulation,
        y: first.activations().to_vec(),
        shared_paths,
        recourse: outcome.recourse,
        path_count,
        weight: outcome.value,
        objective: (path_count as u64 + outcome.value) as f64,
        status,
    }
}

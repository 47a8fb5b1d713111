//! Two-stage decompositions over a discrete scenario set.
//!
//! MA fixes only the number of paths up front; each scenario then picks its
//! own paths and weights. LA fixes the paths as well and leaves only the
//! weights to the scenario. Either way the objective is `Y + W` with `Y` the
//! path count and `W` the largest per-scenario weight total. A scenario may
//! leave an active path idle (weight zero), which keeps every LA solution
//! valid for MA and every pooled naive solution valid for LA.

pub mod ccg;
pub mod master;
pub mod sub;

use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{distinct_paths, evaluate, flow_to_paths, FlowAssignment, Graph, Path, WeightedDecomposition};
use crate::milp::{default_kbar, SolveStatus, SolverConfig};
use crate::poly::{min_path_cover, solve_weight_min, Variant};
use crate::robust::{solve_scenario, DiscreteUncertaintySet};

pub use ccg::{ccg_solve, CcgOutcome, CcgState, IterationRecord};
pub use master::{build_master, extract_first_stage, make_cut, Cut, FirstStage, MasterVars};
pub use sub::{solve_subproblem, ScenarioRecourse, SubOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formulation {
    Ma,
    La,
    Naive,
}

impl Formulation {
    pub fn as_str(self) -> &'static str {
        match self {
            Formulation::Ma => "ma",
            Formulation::La => "la",
            Formulation::Naive => "naive",
        }
    }
}

impl FromStr for Formulation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ma" => Ok(Formulation::Ma),
            "la" => Ok(Formulation::La),
            "naive" => Ok(Formulation::Naive),
            other => Err(Error::Parse(format!("unknown formulation '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjustableResult {
    pub formulation: Formulation,
    /// Slot activations; for the naive method one entry per pooled path.
    pub y: Vec<bool>,
    /// LA: the first-stage paths. Naive: the pool. MA: empty.
    pub shared_paths: Vec<Path>,
    pub recourse: Vec<ScenarioRecourse>,
    /// `Y`
    pub path_count: usize,
    /// `W`
    pub weight: u64,
    pub objective: f64,
    pub status: SolveStatus,
}

impl AdjustableResult {
    /// Checks every scenario's recourse against its bounds and the first
    /// stage, and that `W` is the largest weight total.
    pub fn verify(&self, graph: &Graph, set: &DiscreteUncertaintySet) -> std::result::Result<(), String> {
        if self.recourse.len() != set.scenarios.len() {
            return Err(format!("{} recourse entries for {} scenarios", self.recourse.len(), set.scenarios.len()));
        }
        for (i, (r, s)) in self.recourse.iter().zip(&set.scenarios).enumerate() {
            if !evaluate(graph, &r.decomposition, s, 1.0, 1.0).feasible {
                return Err(format!("scenario {i} is not covered"));
            }
            if r.decomposition.len() > self.path_count {
                return Err(format!("scenario {i} uses {} paths, Y = {}", r.decomposition.len(), self.path_count));
            }
            if self.formulation != Formulation::Ma && !r.decomposition.paths.iter().all(|p| self.shared_paths.contains(p)) {
                return Err(format!("scenario {i} uses a path outside the first stage"));
            }
        }
        let max = self.recourse.iter().map(ScenarioRecourse::total_weight).max().unwrap_or(0);
        if max != self.weight {
            return Err(format!("W = {} but the largest weight total is {max}", self.weight));
        }
        if self.objective != (self.path_count as u64 + self.weight) as f64 {
            return Err("objective differs from Y + W".into());
        }
        Ok(())
    }
}

/// Lower bound on `Y`. LA must cover every edge that is positive in some
/// scenario with one shared path set, so it solves the cover problem on the
/// componentwise largest lower bounds. MA only needs each scenario covered on
/// its own, so it takes the largest per-scenario cover.
pub fn presolve_lower_bound(formulation: Formulation, graph: &Graph, set: &DiscreteUncertaintySet) -> Result<usize> {
    match formulation {
        Formulation::Ma => {
            let mut best = 0;
            for s in &set.scenarios {
                best = best.max(min_path_cover(graph, &s.lowers())?.len());
            }
            Ok(best)
        }
        _ => {
            let mut lower = vec![0u64; graph.edge_count()];
            for s in &set.scenarios {
                for (l, b) in lower.iter_mut().zip(&s.0) {
                    *l = (*l).max(b.lower);
                }
            }
            Ok(min_path_cover(graph, &lower)?.len())
        }
    }
}

/// Minimum-weight decomposition of each scenario, peeled into few paths.
fn peeled_minimum(graph: &Graph, set: &DiscreteUncertaintySet) -> Result<Vec<WeightedDecomposition>> {
    set.scenarios
        .iter()
        .enumerate()
        .map(|(index, s)| {
            let variant = if s.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
            let units = solve_weight_min(graph, s, variant).map_err(|e| match e {
                Error::Infeasible => Error::InfeasibleAt { index },
                e => e,
            })?;
            flow_to_paths(graph, &FlowAssignment(units.coverage(graph)))
        })
        .collect()
}

/// Slot count for the masters. Giving every scenario its own peeled
/// minimum-weight decomposition is feasible with `W` at its smallest possible
/// value, so an optimal `Y` never exceeds that solution's path count: the
/// largest per-scenario count for MA, the pooled count for LA. Also capped by
/// the largest per-scenario default.
pub fn adjustable_kbar(formulation: Formulation, graph: &Graph, set: &DiscreteUncertaintySet) -> Result<usize> {
    let peeled = peeled_minimum(graph, set)?;
    let heuristic = match formulation {
        Formulation::Ma => peeled.iter().map(WeightedDecomposition::len).max().unwrap_or(0),
        _ => distinct_paths(peeled.iter().flat_map(|d| d.paths.iter())).len(),
    };
    let default = set.scenarios.iter().map(|s| default_kbar(graph, s)).max().unwrap_or(1);
    Ok(heuristic.min(default).max(1))
}

/// Solves each scenario on its own with `a_y = a_w = 1` and pools the
/// distinct paths.
pub fn naive_solve(graph: &Graph, set: &DiscreteUncertaintySet, config: &SolverConfig) -> Result<AdjustableResult> {
    if set.scenarios.is_empty() {
        return Err(Error::InvalidConfig("the scenario set is empty".into()));
    }
    let mut recourse = Vec::with_capacity(set.scenarios.len());
    let mut status = SolveStatus::Optimal;
    for (index, s) in set.scenarios.iter().enumerate() {
        let sol = solve_scenario(graph, s.clone(), 1.0, 1.0, config).map_err(|e| match e {
            Error::Infeasible => Error::InfeasibleAt { index },
            e => e,
        })?;
        if sol.status != SolveStatus::Optimal {
            status = SolveStatus::Feasible;
        }
        recourse.push(ScenarioRecourse {
            decomposition: sol.decomposition,
            slot_weights: Vec::new(),
            proven: sol.status == SolveStatus::Optimal,
        });
    }
    let pool = distinct_paths(recourse.iter().flat_map(|r| r.decomposition.paths.iter()));
    for r in &mut recourse {
        r.slot_weights = pool
            .iter()
            .map(|p| r.decomposition.iter().filter(|(q, _)| *q == p).map(|(_, w)| w).sum())
            .collect();
    }
    let weight = recourse.iter().map(ScenarioRecourse::total_weight).max().unwrap_or(0);
    let objective = (pool.len() as u64 + weight) as f64;
    Ok(AdjustableResult {
        formulation: Formulation::Naive,
        y: vec![true; pool.len()],
        path_count: pool.len(),
        shared_paths: pool,
        recourse,
        weight,
        objective,
        status,
    })
}

/// Dispatches to the naive method or the generation loop.
pub fn solve_adjustable(
    formulation: Formulation,
    graph: &Graph,
    set: &DiscreteUncertaintySet,
    config: &SolverConfig,
) -> Result<(AdjustableResult, Option<CcgState>)> {
    match formulation {
        Formulation::Naive => Ok((naive_solve(graph, set, config)?, None)),
        f => {
            let out = ccg_solve(f, graph, set, config)?;
            Ok((out.result, Some(out.state)))
        }
    }
}

#[cfg(test)]
mod tests;

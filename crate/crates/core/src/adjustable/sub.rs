//! Per-scenario recourse problems for a fixed first stage.

use crate::error::{Error, Result};
use crate::graph::{flow_to_paths, FlowAssignment, Graph, Path, Scenario, UpperBound, WeightedDecomposition};
use crate::milp::builder::default_wmax;
use crate::milp::{solve_decomposition, solve_with, LinearModel, ModelVariant, Sense, SolveStatus, SolverConfig};
use crate::poly::{solve_weight_min, Variant};
use crate::robust::DiscreteUncertaintySet;

use super::master::FirstStage;

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecourse {
    /// Paths with positive weight in this scenario.
    pub decomposition: WeightedDecomposition,
    /// LA only: weight of every first-stage path, zeros included.
    pub slot_weights: Vec<u64>,
    /// The weight total is proven minimal.
    pub proven: bool,
}

impl ScenarioRecourse {
    pub fn total_weight(&self) -> u64 {
        self.decomposition.total_weight()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubOutcome {
    /// Largest scenario weight total; ties go to the lowest index.
    pub worst: usize,
    pub value: u64,
    pub recourse: Vec<ScenarioRecourse>,
}

impl SubOutcome {
    pub fn proven(&self) -> bool {
        self.recourse.iter().all(|r| r.proven)
    }
}

/// Solves every scenario for the given first stage. The first infeasible
/// scenario in index order is reported as `InfeasibleAt`.
pub fn solve_subproblem(
    graph: &Graph,
    first_stage: &FirstStage,
    set: &DiscreteUncertaintySet,
    config: &SolverConfig,
) -> Result<SubOutcome> {
    let mut recourse = Vec::with_capacity(set.scenarios.len());
    for (index, scenario) in set.scenarios.iter().enumerate() {
        let r = match first_stage {
            FirstStage::Ma { .. } => ma_recourse(graph, scenario, first_stage.path_count(), config)?,
            FirstStage::La { paths, .. } => la_recourse(graph, scenario, paths, config)?,
        };
        recourse.push(r.ok_or(Error::InfeasibleAt { index })?);
    }
    let mut worst = 0;
    for (i, r) in recourse.iter().enumerate() {
        if r.total_weight() > recourse[worst].total_weight() {
            worst = i;
        }
    }
    let value = recourse.get(worst).map_or(0, ScenarioRecourse::total_weight);
    Ok(SubOutcome { worst, value, recourse })
}

fn sub_config(config: &SolverConfig) -> SolverConfig {
    SolverConfig { time_limit: config.time_limit_sub, ..config.clone() }
}

/// Least total weight with at most `k` paths; `None` when impossible.
pub fn ma_recourse(graph: &Graph, scenario: &Scenario, k: usize, config: &SolverConfig) -> Result<Option<ScenarioRecourse>> {
    let proven = |decomposition| Some(ScenarioRecourse { decomposition, slot_weights: Vec::new(), proven: true });
    if scenario.0.iter().all(|b| b.lower == 0) {
        return Ok(proven(WeightedDecomposition::default()));
    }
    if k == 0 {
        return Ok(None);
    }
    // Peeling a minimum-weight flow is optimal whenever it needs few enough paths.
    let variant = if scenario.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
    let units = match solve_weight_min(graph, scenario, variant) {
        Ok(d) => d,
        Err(Error::Infeasible) => return Ok(None),
        Err(e) => return Err(e),
    };
    let peeled = flow_to_paths(graph, &FlowAssignment(units.coverage(graph)))?;
    if peeled.len() <= k {
        return Ok(proven(peeled));
    }
    let cfg = SolverConfig { kbar: Some(k), wmax: Some(config.wmax.unwrap_or_else(|| default_wmax(scenario))), ..sub_config(config) };
    match solve_decomposition(graph, scenario, 0.0, 1.0, &cfg, ModelVariant::Inexact) {
        Ok((result, decomposition)) => Ok(Some(ScenarioRecourse {
            decomposition,
            slot_weights: Vec::new(),
            proven: result.status == SolveStatus::Optimal,
        })),
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Least total weight on the fixed `paths`, each weight possibly zero.
pub fn la_recourse(graph: &Graph, scenario: &Scenario, paths: &[Path], config: &SolverConfig) -> Result<Option<ScenarioRecourse>> {
    let wmax = config.wmax.unwrap_or_else(|| default_wmax(scenario));
    let mut on_edge = vec![Vec::new(); graph.edge_count()];
    let mut model = LinearModel::new();
    let mut w = Vec::with_capacity(paths.len());
    for (i, p) in paths.iter().enumerate() {
        let cap = p.edges().iter().filter_map(|&e| scenario[e].upper.finite()).fold(wmax, u64::min);
        w.push(model.integer(format!("w_{i}"), 0, cap as i64));
        for &e in p.edges() {
            on_edge[e].push(w[i]);
        }
    }
    for (e, vars) in on_edge.iter().enumerate() {
        let b = scenario[e];
        if vars.is_empty() {
            if b.lower > 0 {
                return Ok(None);
            }
            continue;
        }
        let row: Vec<(usize, i64)> = vars.iter().map(|&v| (v, 1)).collect();
        let id = graph.edge(e).id;
        if b.lower > 0 {
            model.add_constraint(format!("covl_{id}"), row.clone(), Sense::Ge, b.lower as i64);
        }
        if let UpperBound::Finite(u) = b.upper {
            model.add_constraint(format!("covu_{id}"), row, Sense::Le, u as i64);
        }
    }
    model.set_objective(w.iter().map(|&v| (v, 1.0)).collect());
    let cfg = sub_config(config);
    let result = solve_with(&model, &cfg, cfg.limits(cfg.time_limit))?;
    match result.status {
        SolveStatus::Infeasible => Ok(None),
        SolveStatus::TimeLimit => Err(Error::TimeLimit),
        status => {
            let slot_weights: Vec<u64> = w.iter().map(|&v| result.value(v) as u64).collect();
            let (kept, weights): (Vec<Path>, Vec<u64>) =
                paths.iter().cloned().zip(slot_weights.iter().copied()).filter(|&(_, w)| w > 0).unzip();
            Ok(Some(ScenarioRecourse {
                decomposition: WeightedDecomposition::new(kept, weights),
                slot_weights,
                proven: status == SolveStatus::Optimal,
            }))
        }
    }
}

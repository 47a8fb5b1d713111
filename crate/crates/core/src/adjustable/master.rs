//! Master problems over a subset of scenarios, first-stage extraction and
//! infeasibility cuts.

use crate::error::{Error, Result};
use crate::graph::{Graph, Path, Scenario};
use crate::milp::builder::{add_paths, add_slots, add_weights, default_kbar, default_wmax, WeightOptions};
use crate::milp::{walk_slot, LinearModel, ModelVars, Sense, SolveResult, SolverConfig};

use crate::poly::{solve_weight_min, Variant};
use crate::robust::DiscreteUncertaintySet;

use super::{presolve_lower_bound, Formulation};

/// Variable ids of a master model. For LA every entry of `scenarios` shares
/// `y` and `x`; for MA only `y` is shared.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MasterVars {
    pub y: Vec<usize>,
    pub total_weight: usize,
    pub scenarios: Vec<ModelVars>,
}

/// First-stage decisions read from a master solution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FirstStage {
    Ma { y: Vec<bool> },
    La { y: Vec<bool>, x: Vec<Vec<bool>>, paths: Vec<Path> },
}

impl FirstStage {
    pub fn path_count(&self) -> usize {
        match self {
            FirstStage::Ma { y } | FirstStage::La { y, .. } => y.iter().filter(|&&a| a).count(),
        }
    }

    pub fn activations(&self) -> &[bool] {
        match self {
            FirstStage::Ma { y } | FirstStage::La { y, .. } => y,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cut {
    /// `Σ y ≥ n`.
    MinPaths(usize),
    /// Excludes one 0/1 pattern of `y` and `x`.
    NoGood { y: Vec<bool>, x: Vec<Vec<bool>> },
}

impl Cut {
    /// The cut as a `≥` row over the master's variables.
    pub fn row(&self, vars: &MasterVars) -> Result<(Vec<(usize, i64)>, i64)> {
        match self {
            Cut::MinPaths(n) => Ok((vars.y.iter().map(|&v| (v, 1)).collect(), *n as i64)),
            Cut::NoGood { y, x } => {
                let shared = vars.scenarios.first().ok_or_else(|| Error::InvalidConfig("master without scenarios".into()))?;
                if y.len() != vars.y.len() || x.len() != shared.x.len() {
                    return Err(Error::InvalidConfig("cut pattern does not match the slot count".into()));
                }
                let mut terms = Vec::new();
                let mut ones = 0;
                let pattern = y.iter().zip(&vars.y).chain(x.iter().zip(&shared.x).flat_map(|(xi, vi)| xi.iter().zip(vi)));
                for (&bit, &var) in pattern {
                    if bit {
                        terms.push((var, -1));
                        ones += 1;
                    } else {
                        terms.push((var, 1));
                    }
                }
                Ok((terms, 1 - ones))
            }
        }
    }
}

/// MA forbids every path count up to the current one; LA forbids exactly the
/// current paths.
pub fn make_cut(first_stage: &FirstStage) -> Cut {
    match first_stage {
        FirstStage::Ma { .. } => Cut::MinPaths(first_stage.path_count() + 1),
        FirstStage::La { y, x, .. } => Cut::NoGood { y: y.clone(), x: x.clone() },
    }
}

/// Slot count and weight cap for a master: the config values, or the
/// largest per-scenario defaults.
pub fn master_dimensions(graph: &Graph, scenarios: &[Scenario], config: &SolverConfig) -> (usize, u64) {
    let kbar = config
        .kbar
        .unwrap_or_else(|| scenarios.iter().map(|s| default_kbar(graph, s)).max().unwrap_or(1))
        .max(1);
    let wmax = config
        .wmax
        .unwrap_or_else(|| scenarios.iter().map(default_wmax).max().unwrap_or(1))
        .max(1);
    (kbar, wmax)
}

/// Objective `Σ y_i + W` with `Σ_i w_i^ξ ≤ W` for every scenario in `subset`.
/// Active slots may carry weight zero in a scenario that does not need them.
pub fn build_master(
    formulation: Formulation,
    graph: &Graph,
    subset: &[Scenario],
    cuts: &[Cut],
    config: &SolverConfig,
) -> Result<(LinearModel, MasterVars)> {
    if subset.is_empty() {
        return Err(Error::InvalidConfig("master needs at least one scenario".into()));
    }
    if subset.iter().any(|s| s.len() != graph.edge_count()) {
        return Err(Error::InvalidInstance("scenario does not match the edge count".into()));
    }
    let (kbar, wmax) = master_dimensions(graph, subset, config);
    let (min_paths, min_weight) = subset_bounds(formulation, graph, subset);
    let mut model = LinearModel::new();
    let y = add_slots(&mut model, kbar, "");
    for &v in y.iter().take(min_paths) {
        model.variables[v].lower = 1;
    }
    // Right after y so that branching settles the objective before the paths.
    let total_weight = model.integer("W", min_weight.min(kbar as u64 * wmax) as i64, (kbar as u64 * wmax) as i64);
    let opts = WeightOptions { wmax, positive: false };
    let mut scenarios = Vec::with_capacity(subset.len());
    match formulation {
        Formulation::Ma => {
            for (j, bounds) in subset.iter().enumerate() {
                let tag = format!("_s{j}");
                let x = add_paths(&mut model, graph, &y, &tag);
                let (w, z) = add_weights(&mut model, graph, &y, &x, bounds, &opts, &tag);
                // Active slots of one scenario are interchangeable.
                if config.symmetry_breaking {
                    for i in 1..kbar {
                        model.add_constraint(format!("sym_w{tag}_{i}"), vec![(w[i - 1], 1), (w[i], -1)], Sense::Ge, 0);
                    }
                }
                scenarios.push(ModelVars { y: y.clone(), x, w, z });
            }
        }
        Formulation::La => {
            let x = add_paths(&mut model, graph, &y, "");
            for (j, bounds) in subset.iter().enumerate() {
                let tag = format!("_s{j}");
                let (w, z) = add_weights(&mut model, graph, &y, &x, bounds, &opts, &tag);
                // Slots can be sorted by the first scenario's weights, idle
                // active slots ahead of inactive ones.
                if config.symmetry_breaking && j == 0 {
                    for i in 1..kbar {
                        model.add_constraint(format!("sym_w{tag}_{i}"), vec![(w[i - 1], 1), (w[i], -1)], Sense::Ge, 0);
                    }
                }
                scenarios.push(ModelVars { y: y.clone(), x: x.clone(), w, z });
            }
        }
        Formulation::Naive => return Err(Error::InvalidConfig("the naive method has no master problem".into())),
    }
    for (j, vars) in scenarios.iter().enumerate() {
        let mut row: Vec<(usize, i64)> = vars.w.iter().map(|&w| (w, 1)).collect();
        row.push((total_weight, -1));
        model.add_constraint(format!("maxw_s{j}"), row, Sense::Le, 0);
    }
    let vars = MasterVars { y, total_weight, scenarios };
    for (c, cut) in cuts.iter().enumerate() {
        let (terms, rhs) = cut.row(&vars)?;
        model.add_constraint(format!("cut_{c}"), terms, Sense::Ge, rhs);
    }
    let mut objective: Vec<(usize, f64)> = vars.y.iter().map(|&v| (v, 1.0)).collect();
    objective.push((vars.total_weight, 1.0));
    model.set_objective(objective);
    Ok((model, vars))
}

/// Valid lower bounds on `Y` and `W` for the scenarios of `subset`; they keep
/// the objective bound tight while the paths are still open.
fn subset_bounds(formulation: Formulation, graph: &Graph, subset: &[Scenario]) -> (usize, u64) {
    let set = DiscreteUncertaintySet { scenarios: subset.to_vec() };
    let min_paths = presolve_lower_bound(formulation, graph, &set).unwrap_or(0);
    let min_weight = subset
        .iter()
        .filter_map(|s| {
            let variant = if s.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
            solve_weight_min(graph, s, variant).ok().map(|d| d.total_weight())
        })
        .max()
        .unwrap_or(0);
    (min_paths, min_weight)
}

pub fn extract_first_stage(formulation: Formulation, graph: &Graph, vars: &MasterVars, result: &SolveResult) -> Result<FirstStage> {
    if !result.status.has_solution() {
        return Err(Error::MalformedAssignment("master result carries no solution".into()));
    }
    let y: Vec<bool> = vars.y.iter().map(|&v| result.value(v) == 1).collect();
    match formulation {
        Formulation::Ma => Ok(FirstStage::Ma { y }),
        Formulation::La => {
            let shared = &vars.scenarios[0];
            let x: Vec<Vec<bool>> = shared.x.iter().map(|xi| xi.iter().map(|&v| result.value(v) == 1).collect()).collect();
            let mut paths = Vec::new();
            for (i, &active) in y.iter().enumerate() {
                if active {
                    let p = walk_slot(graph, &shared.x[i], &result.values)
                        .map_err(|msg| Error::MalformedAssignment(format!("slot {i}: {msg}")))?;
                    paths.push(p);
                }
            }
            Ok(FirstStage::La { y, x, paths })
        }
        Formulation::Naive => Err(Error::InvalidConfig("the naive method has no master problem".into())),
    }
}

//! Integer linear models for path decompositions and the solvers behind them.

pub mod bb;
pub mod brute;
pub mod builder;
pub mod lp_format;
pub mod model;

use std::time::Duration;

use crate::error::{Error, Result};
use crate::graph::{flow_to_paths, FlowAssignment, Graph, InexactBounds, Path, WeightedDecomposition};
use crate::poly::{solve_weight_min, Variant};

pub use bb::{solve_builtin, SearchLimits};
pub use brute::{brute_force, BruteForceResult};
pub use builder::{build_decomposition_model, default_kbar, default_wmax, ModelVariant, ModelVars};
pub use model::{Constraint, LinearModel, Sense, SolveResult, SolveStatus, VarKind, Variable};

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum Backend {
    #[default]
    BuiltIn,
    /// Shell command template; `{lp}` is replaced by the exported model path
    /// and `{sol}` by the path the command must write its solution to.
    External { command: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Slot count `K̄`; `None` selects the instance default.
    pub kbar: Option<usize>,
    /// Weight cap; `None` selects the instance default.
    pub wmax: Option<u64>,
    pub epsilon: f64,
    pub time_limit: Option<Duration>,
    pub time_limit_master: Option<Duration>,
    pub time_limit_sub: Option<Duration>,
    pub time_limit_total: Option<Duration>,
    pub backend: Backend,
    pub seed: u64,
    /// Order active slots by non-increasing weight in deterministic models.
    pub symmetry_breaking: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            kbar: None,
            wmax: None,
            epsilon: 1e-6,
            time_limit: None,
            time_limit_master: Some(Duration::from_secs(1800)),
            time_limit_sub: Some(Duration::from_secs(180)),
            time_limit_total: Some(Duration::from_secs(86_400)),
            backend: Backend::BuiltIn,
            seed: 0,
            symmetry_breaking: true,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.kbar == Some(0) {
            return Err(Error::InvalidConfig("slot count must be at least 1".into()));
        }
        if self.wmax == Some(0) {
            return Err(Error::InvalidConfig("weight cap must be at least 1".into()));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::InvalidConfig("epsilon must be non-negative".into()));
        }
        Ok(())
    }

    pub fn limits(&self, time_limit: Option<Duration>) -> SearchLimits {
        SearchLimits { time_limit, continue_until_feasible: false, epsilon: self.epsilon }
    }
}

/// Solves with the configured backend and `config.time_limit`.
pub fn solve(model: &LinearModel, config: &SolverConfig) -> Result<SolveResult> {
    solve_with(model, config, config.limits(config.time_limit))
}

pub fn solve_with(model: &LinearModel, config: &SolverConfig, limits: SearchLimits) -> Result<SolveResult> {
    match &config.backend {
        Backend::BuiltIn => Ok(solve_builtin(model, limits)),
        Backend::External { command } => lp_format::solve_external(model, command),
    }
}

/// Reads the selected paths out of an assignment, slot by slot.
pub fn extract_decomposition(vars: &ModelVars, result: &SolveResult, graph: &Graph) -> Result<WeightedDecomposition> {
    if !result.status.has_solution() {
        return Err(Error::MalformedAssignment("result carries no solution".into()));
    }
    let mut paths = Vec::new();
    let mut weights = Vec::new();
    for i in 0..vars.kbar() {
        if result.value(vars.y[i]) == 0 {
            continue;
        }
        let path = walk_slot(graph, &vars.x[i], &result.values)
            .map_err(|msg| Error::MalformedAssignment(format!("slot {i}: {msg}")))?;
        let w = result.value(vars.w[i]);
        if w < 1 {
            return Err(Error::MalformedAssignment(format!("slot {i} is active with weight {w}")));
        }
        paths.push(path);
        weights.push(w as u64);
    }
    Ok(WeightedDecomposition::new(paths, weights))
}

/// Follows the unique selected edge out of each node from s to t.
pub(crate) fn walk_slot(graph: &Graph, x: &[usize], values: &[i64]) -> std::result::Result<Path, String> {
    let selected: Vec<usize> = (0..graph.edge_count()).filter(|&e| values[x[e]] == 1).collect();
    let mut path = Vec::new();
    let mut v = graph.source();
    while v != graph.sink() {
        let mut out = graph.out_edges(v).iter().copied().filter(|&e| values[x[e]] == 1);
        let e = out.next().ok_or_else(|| format!("no selected edge leaves {}", graph.node_name(v)))?;
        if out.next().is_some() {
            return Err(format!("several selected edges leave {}", graph.node_name(v)));
        }
        path.push(e);
        v = graph.edge(e).head;
        if path.len() > graph.edge_count() {
            return Err("selected edges contain a cycle".into());
        }
    }
    if path.len() != selected.len() {
        return Err("selected edges off the s-t path".into());
    }
    Ok(Path(path))
}

/// Builds, solves and extracts in one step. Returns `Infeasible` or
/// `TimeLimit` errors when there is no incumbent.
pub fn solve_decomposition(
    graph: &Graph,
    bounds: &InexactBounds,
    a_y: f64,
    a_w: f64,
    config: &SolverConfig,
    variant: ModelVariant,
) -> Result<(SolveResult, WeightedDecomposition)> {
    config.validate()?;
    let mut config = config.clone();
    if config.kbar.is_none() {
        let effective = builder::effective_bounds(bounds, variant)?;
        config.kbar = Some(trimmed_kbar(graph, &effective)?);
    }
    let (model, vars) = build_decomposition_model(graph, bounds, a_y, a_w, &config, variant)?;
    let result = solve(&model, &config)?;
    match result.status {
        SolveStatus::Infeasible => Err(Error::Infeasible),
        SolveStatus::TimeLimit => Err(Error::TimeLimit),
        _ => {
            let decomp = extract_decomposition(&vars, &result, graph)?;
            Ok((result, decomp))
        }
    }
}

/// Slot count that still contains an optimal solution for any `a_y, a_w ≥ 0`.
///
/// Peeling a minimum-weight flow gives a feasible decomposition with `k₀`
/// paths and the least possible total weight `W₀`. Any solution with more than
/// `k₀` paths has at least the same weight, so it cannot beat that one.
pub fn trimmed_kbar(graph: &Graph, bounds: &InexactBounds) -> Result<usize> {
    let default = default_kbar(graph, bounds);
    let variant = if bounds.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
    let units = solve_weight_min(graph, bounds, variant)?;
    let peeled = flow_to_paths(graph, &FlowAssignment(units.coverage(graph)))?;
    Ok(default.min(peeled.len()).max(1))
}

/// Exact variant when the bounds allow it, the general one otherwise.
pub fn variant_for(bounds: &InexactBounds) -> ModelVariant {
    if bounds.is_exact() {
        ModelVariant::Exact
    } else {
        ModelVariant::Inexact
    }
}

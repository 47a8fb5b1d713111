//! Decomposition models over `K̄` path slots.
//!
//! Slot `i` owns an activation `y_i`, a binary path indicator `x_{e,i}` per
//! edge, a weight `w_i` and per-edge products `z_{e,i} = w_i·x_{e,i}`. The
//! products are linearized exactly with
//! `0 ≤ z ≤ W·x`, `z ≤ w`, `z ≥ w - W·(1 - x)` for the weight cap `W`.
//!
//! Besides the defining constraints, each slot carries redundant but valid
//! rows that strengthen propagation: node capacities, weighted conservation of
//! `z` along the path and `Σ_{e out of s} z_{e,i} = w_i`.

use crate::error::{Error, Result};
use crate::graph::{Graph, InexactBounds, UpperBound};

use super::model::{LinearModel, Sense};
use super::SolverConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelVariant {
    /// `f^l = f^u` on every edge; coverage is an equality.
    Exact,
    Inexact,
    /// Upper bounds are ignored.
    InexactNoUb,
}

/// Variable ids of one slot family. `x[i][e]`, `z[i][e]` are indexed by slot,
/// then edge index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ModelVars {
    pub y: Vec<usize>,
    pub x: Vec<Vec<usize>>,
    pub w: Vec<usize>,
    pub z: Vec<Vec<usize>>,
}

impl ModelVars {
    pub fn kbar(&self) -> usize {
        self.y.len()
    }
}

/// Weight cap: the largest finite upper bound (or lower bound, whichever is
/// larger), or `Σ f^l` when no finite upper bound exists.
pub fn default_wmax(bounds: &InexactBounds) -> u64 {
    let finite_max = bounds.0.iter().filter_map(|b| b.upper.finite()).max();
    let w = match finite_max {
        Some(u) => u.max(bounds.0.iter().map(|b| b.lower).max().unwrap_or(0)),
        None => bounds.lower_sum(),
    };
    w.max(1)
}

/// Slot count: maximum admissible flow out of the source, with unbounded
/// source edges counted as `Σ f^l`.
pub fn default_kbar(graph: &Graph, bounds: &InexactBounds) -> usize {
    let total_lower = bounds.lower_sum();
    let k: u64 = graph
        .out_edges(graph.source())
        .iter()
        .map(|&e| bounds[e].upper.or_cap(total_lower))
        .sum();
    (k as usize).max(1)
}

pub(crate) fn effective_bounds(bounds: &InexactBounds, variant: ModelVariant) -> Result<InexactBounds> {
    match variant {
        ModelVariant::Exact if !bounds.is_exact() => Err(Error::BadVariant),
        ModelVariant::InexactNoUb => Ok(bounds.without_upper()),
        _ => Ok(bounds.clone()),
    }
}

/// Adds `K̄` activations with `y_i ≥ y_{i+1}`.
pub(crate) fn add_slots(model: &mut LinearModel, kbar: usize, tag: &str) -> Vec<usize> {
    let y: Vec<usize> = (0..kbar).map(|i| model.binary(format!("y{tag}_{i}"))).collect();
    for i in 1..kbar {
        model.add_constraint(format!("sym_y{tag}_{i}"), vec![(y[i - 1], 1), (y[i], -1)], Sense::Ge, 0);
    }
    y
}

fn topo_edges(graph: &Graph) -> Vec<usize> {
    let order = graph.topological_order().unwrap_or_else(|| (0..graph.node_count()).collect());
    order.iter().flat_map(|&v| graph.out_edges(v).iter().copied()).collect()
}

/// One binary path per active slot. Variables are created slot by slot in
/// topological edge order.
pub(crate) fn add_paths(model: &mut LinearModel, graph: &Graph, y: &[usize], tag: &str) -> Vec<Vec<usize>> {
    let m = graph.edge_count();
    let edges = topo_edges(graph);
    let mut x = Vec::with_capacity(y.len());
    for (i, &yi) in y.iter().enumerate() {
        let mut xi = vec![usize::MAX; m];
        for &e in &edges {
            xi[e] = model.binary(format!("x{tag}_{}_{i}", graph.edge(e).id));
        }
        add_path_rows(model, graph, yi, &xi, &format!("{tag}_{i}"));
        x.push(xi);
    }
    x
}

fn add_path_rows(model: &mut LinearModel, graph: &Graph, yi: usize, xi: &[usize], tag: &str) {
    let (s, t) = (graph.source(), graph.sink());
    let mut src: Vec<(usize, i64)> = graph.out_edges(s).iter().map(|&e| (xi[e], 1)).collect();
    src.push((yi, -1));
    model.add_constraint(format!("src{tag}"), src, Sense::Eq, 0);
    let mut snk: Vec<(usize, i64)> = graph.in_edges(t).iter().map(|&e| (xi[e], 1)).collect();
    snk.push((yi, -1));
    model.add_constraint(format!("snk{tag}"), snk, Sense::Eq, 0);
    for v in 0..graph.node_count() {
        if v == s || v == t {
            continue;
        }
        let mut cons: Vec<(usize, i64)> = graph.in_edges(v).iter().map(|&e| (xi[e], 1)).collect();
        cons.extend(graph.out_edges(v).iter().map(|&e| (xi[e], -1)));
        if cons.is_empty() {
            continue;
        }
        model.add_constraint(format!("cons{tag}_{}", graph.node_name(v)), cons, Sense::Eq, 0);
        if graph.in_edges(v).len() > 1 {
            let mut cap: Vec<(usize, i64)> = graph.in_edges(v).iter().map(|&e| (xi[e], 1)).collect();
            cap.push((yi, -1));
            model.add_constraint(format!("ncap{tag}_{}", graph.node_name(v)), cap, Sense::Le, 0);
        }
    }
    // Edges on no s-t path can never carry a path.
    for (e, ok) in graph.edges_on_st_paths().into_iter().enumerate() {
        if !ok {
            model.add_constraint(format!("dead{tag}_{}", graph.edge(e).id), vec![(xi[e], 1)], Sense::Eq, 0);
        }
    }
}

pub(crate) struct WeightOptions {
    pub wmax: u64,
    /// Active slots carry weight at least one.
    pub positive: bool,
}

/// Weights, linearized products, coverage of `bounds` and the linking rows.
pub(crate) fn add_weights(
    model: &mut LinearModel,
    graph: &Graph,
    y: &[usize],
    x: &[Vec<usize>],
    bounds: &InexactBounds,
    opts: &WeightOptions,
    tag: &str,
) -> (Vec<usize>, Vec<Vec<usize>>) {
    let m = graph.edge_count();
    let wm = opts.wmax as i64;
    let mut w = Vec::with_capacity(y.len());
    let mut z = Vec::with_capacity(y.len());
    for (i, &yi) in y.iter().enumerate() {
        let wi = model.integer(format!("w{tag}_{i}"), 0, wm);
        model.add_constraint(format!("wcap{tag}_{i}"), vec![(wi, 1), (yi, -wm)], Sense::Le, 0);
        if opts.positive {
            model.add_constraint(format!("wpos{tag}_{i}"), vec![(wi, 1), (yi, -1)], Sense::Ge, 0);
        }
        let mut zi = vec![usize::MAX; m];
        for e in topo_edges(graph) {
            let id = graph.edge(e).id;
            let ze = model.integer(format!("z{tag}_{id}_{i}"), 0, wm);
            let xe = x[i][e];
            model.add_constraint(format!("mc1{tag}_{id}_{i}"), vec![(ze, 1), (xe, -wm)], Sense::Le, 0);
            model.add_constraint(format!("mc2{tag}_{id}_{i}"), vec![(ze, 1), (wi, -1)], Sense::Le, 0);
            model.add_constraint(format!("mc3{tag}_{id}_{i}"), vec![(ze, 1), (wi, -1), (xe, -wm)], Sense::Ge, -wm);
            zi[e] = ze;
        }
        let (s, t) = (graph.source(), graph.sink());
        for (v, name) in [(s, "zsrc"), (t, "zsnk")] {
            let adj = if v == s { graph.out_edges(v) } else { graph.in_edges(v) };
            let mut row: Vec<(usize, i64)> = adj.iter().map(|&e| (zi[e], 1)).collect();
            row.push((wi, -1));
            model.add_constraint(format!("{name}{tag}_{i}"), row, Sense::Eq, 0);
        }
        for v in 0..graph.node_count() {
            if v == s || v == t || graph.in_edges(v).is_empty() && graph.out_edges(v).is_empty() {
                continue;
            }
            let mut row: Vec<(usize, i64)> = graph.in_edges(v).iter().map(|&e| (zi[e], 1)).collect();
            row.extend(graph.out_edges(v).iter().map(|&e| (zi[e], -1)));
            model.add_constraint(format!("zcons{tag}_{}_{i}", graph.node_name(v)), row, Sense::Eq, 0);
        }
        w.push(wi);
        z.push(zi);
    }
    for e in 0..m {
        let id = graph.edge(e).id;
        let cover: Vec<(usize, i64)> = z.iter().map(|zi| (zi[e], 1)).collect();
        let b = bounds[e];
        match b.upper {
            UpperBound::Finite(u) if u == b.lower => {
                model.add_constraint(format!("cov{tag}_{id}"), cover, Sense::Eq, b.lower as i64);
            }
            upper => {
                if b.lower > 0 {
                    model.add_constraint(format!("covl{tag}_{id}"), cover.clone(), Sense::Ge, b.lower as i64);
                }
                if let UpperBound::Finite(u) = upper {
                    model.add_constraint(format!("covu{tag}_{id}"), cover, Sense::Le, u as i64);
                }
            }
        }
        let used: Vec<(usize, i64)> = x.iter().map(|xi| (xi[e], 1)).collect();
        if b.lower > 0 {
            model.add_constraint(format!("use{tag}_{id}"), used.clone(), Sense::Ge, 1);
        }
        if let (true, UpperBound::Finite(u)) = (opts.positive, b.upper) {
            if (u as usize) < x.len() {
                model.add_constraint(format!("usecap{tag}_{id}"), used, Sense::Le, u as i64);
            }
        }
    }
    (w, z)
}

pub fn build_decomposition_model(
    graph: &Graph,
    bounds: &InexactBounds,
    a_y: f64,
    a_w: f64,
    config: &SolverConfig,
    variant: ModelVariant,
) -> Result<(LinearModel, ModelVars)> {
    if bounds.len() != graph.edge_count() {
        return Err(Error::InvalidInstance("bounds do not match the edge count".into()));
    }
    let bounds = effective_bounds(bounds, variant)?;
    let kbar = config.kbar.unwrap_or_else(|| default_kbar(graph, &bounds)).max(1);
    let wmax = config.wmax.unwrap_or_else(|| default_wmax(&bounds)).max(1);
    let mut model = LinearModel::new();
    let y = add_slots(&mut model, kbar, "");
    let x = add_paths(&mut model, graph, &y, "");
    let opts = WeightOptions { wmax, positive: true };
    let (w, z) = add_weights(&mut model, graph, &y, &x, &bounds, &opts, "");
    if config.symmetry_breaking {
        for i in 1..kbar {
            model.add_constraint(format!("sym_w_{i}"), vec![(w[i - 1], 1), (w[i], -1)], Sense::Ge, 0);
        }
    }
    let mut objective = Vec::new();
    for i in 0..kbar {
        if a_y != 0.0 {
            objective.push((y[i], a_y));
        }
        if a_w != 0.0 {
            objective.push((w[i], a_w));
        }
    }
    model.set_objective(objective);
    Ok((model, ModelVars { y, x, w, z }))
}

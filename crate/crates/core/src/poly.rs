//! Polynomial special cases solved by min-cost flow.
//!
//! The reduction adds a super source `s'` and super sink `t'` with edges
//! `s'->s` (cost 1), `t->t'` and `s'->t'` (cost 0), and a supply `M` at `s'`.
//! Every unit crossing `s'->s` is one unit-weight s-t path, so the optimal
//! cost is the minimum number of unit paths, i.e. the minimum total weight.

use crate::error::{Error, Result};
use crate::graph::{trivial_decomposition, FlowAssignment, Graph, InexactBounds, UpperBound, WeightedDecomposition};
use crate::mcf::{solve_mcf, McfNetwork};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    WithUpper,
    NoUpper,
}

#[derive(Debug, Clone)]
pub struct ReductionArtifacts {
    pub network: McfNetwork,
    /// Network edge index for each original edge index.
    pub edge_map: Vec<usize>,
    pub super_source: usize,
    pub super_sink: usize,
    /// `(s', s)`, `(t, t')`, `(s', t')` in that order.
    pub aux_edges: [usize; 3],
    pub supply: u64,
}

impl ReductionArtifacts {
    fn new(graph: &Graph, bounds: impl Iterator<Item = (u64, UpperBound)>, supply: u64) -> Self {
        let n = graph.node_count();
        let mut network = McfNetwork::new(n);
        let edge_map = graph
            .edges()
            .iter()
            .zip(bounds)
            .map(|(e, (l, u))| network.add_edge(e.tail, e.head, 0, l, u))
            .collect();
        let sp = network.add_node(supply as i64);
        let tp = network.add_node(-(supply as i64));
        let cap = UpperBound::Finite(supply);
        let aux_edges = [
            network.add_edge(sp, graph.source(), 1, 0, cap),
            network.add_edge(graph.sink(), tp, 0, 0, cap),
            network.add_edge(sp, tp, 0, 0, cap),
        ];
        Self { network, edge_map, super_source: sp, super_sink: tp, aux_edges, supply }
    }

    fn original_flow(&self, flow: &[u64]) -> FlowAssignment {
        FlowAssignment(self.edge_map.iter().map(|&i| flow[i]).collect())
    }
}

/// Per-edge cap standing in for an unbounded upper bound: no minimal flow
/// carries more than the total lower bound on a single edge.
pub fn unbounded_cap(bounds: &InexactBounds) -> u64 {
    bounds.lower_sum() + 1
}

pub fn build_weight_min_reduction(graph: &Graph, bounds: &InexactBounds, variant: Variant) -> ReductionArtifacts {
    let cap = unbounded_cap(bounds);
    match variant {
        Variant::WithUpper => {
            let supply = bounds.0.iter().map(|b| b.upper.or_cap(cap)).sum::<u64>().max(1);
            ReductionArtifacts::new(graph, bounds.0.iter().map(|b| (b.lower, b.upper)), supply)
        }
        Variant::NoUpper => {
            ReductionArtifacts::new(graph, bounds.0.iter().map(|b| (b.lower, UpperBound::Unbounded)), cap)
        }
    }
}

fn check_shape(graph: &Graph, len: usize) -> Result<()> {
    if len != graph.edge_count() {
        return Err(Error::InvalidInstance(format!(
            "bounds cover {len} edges, graph has {}",
            graph.edge_count()
        )));
    }
    Ok(())
}

/// Minimum total weight decomposition as unit-weight paths.
pub fn solve_weight_min(graph: &Graph, bounds: &InexactBounds, variant: Variant) -> Result<WeightedDecomposition> {
    check_shape(graph, bounds.len())?;
    let red = build_weight_min_reduction(graph, bounds, variant);
    let sol = solve_mcf(&red.network)?;
    if !sol.is_optimal() {
        return Err(Error::Infeasible);
    }
    let decomp = trivial_decomposition(graph, &red.original_flow(&sol.flow))?;
    debug_assert_eq!(decomp.total_weight() as i64, sol.cost);
    Ok(decomp)
}

/// Minimum number of s-t paths covering every edge with a positive lower bound.
pub fn min_path_cover(graph: &Graph, lower: &[u64]) -> Result<WeightedDecomposition> {
    check_shape(graph, lower.len())?;
    let positive = lower.iter().filter(|&&l| l > 0).count() as u64;
    if positive == 0 {
        return Ok(WeightedDecomposition::default());
    }
    let bounds = lower.iter().map(|&l| (u64::from(l > 0), UpperBound::Unbounded));
    let red = ReductionArtifacts::new(graph, bounds, positive);
    let sol = solve_mcf(&red.network)?;
    if !sol.is_optimal() {
        return Err(Error::Infeasible);
    }
    trivial_decomposition(graph, &red.original_flow(&sol.flow))
}

/// Path-count minimum without upper bounds. Each path of the minimum cover
/// gets weight `Σ f^l`, which meets every lower bound on its own.
pub fn solve_path_min_no_ub(graph: &Graph, lower: &[u64]) -> Result<WeightedDecomposition> {
    let mut cover = min_path_cover(graph, lower)?;
    let total: u64 = lower.iter().sum();
    cover.weights.iter_mut().for_each(|w| *w = total);
    Ok(cover)
}

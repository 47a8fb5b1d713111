//! Flow network data model: DAG with designated source and sink, per-edge
//! bounds, s-t paths and weighted decompositions.
//!
//! Edges carry explicit numeric ids and are stored sorted by id, so the
//! position of an edge in [`Graph::edges`] (its *edge index*) orders the same
//! way as its id. Per-edge vectors ([`FlowAssignment`], [`InexactBounds`]) and
//! [`Path`]s are expressed in edge indices.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub u32);

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub id: EdgeId,
    pub tail: usize,
    pub head: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<String>,
    edges: Vec<Edge>,
    source: usize,
    sink: usize,
    out_edges: Vec<Vec<usize>>,
    in_edges: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from node names and `(id, from, to)` triples.
    ///
    /// Only structural problems (unknown node names, duplicate ids or node
    /// names) are errors here; DAG and source/sink rules are reported by
    /// [`validate_instance`].
    pub fn new<S: AsRef<str>>(
        nodes: &[S],
        edges: &[(u32, S, S)],
        source: &str,
        sink: &str,
    ) -> Result<Self> {
        let names: Vec<String> = nodes.iter().map(|n| n.as_ref().to_string()).collect();
        let mut index = HashMap::new();
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::InvalidGraph(format!("duplicate node `{n}`")));
            }
        }
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| Error::InvalidGraph(format!("unknown node `{name}`")))
        };
        let mut raw = Vec::with_capacity(edges.len());
        for (id, from, to) in edges {
            raw.push((*id, lookup(from.as_ref())?, lookup(to.as_ref())?));
        }
        Self::from_indices(names, raw, lookup(source)?, lookup(sink)?)
    }

    pub fn from_indices(
        nodes: Vec<String>,
        mut edges: Vec<(u32, usize, usize)>,
        source: usize,
        sink: usize,
    ) -> Result<Self> {
        let n = nodes.len();
        if source >= n || sink >= n {
            return Err(Error::InvalidGraph("source or sink out of range".into()));
        }
        if source == sink {
            return Err(Error::InvalidGraph("source and sink coincide".into()));
        }
        edges.sort_by_key(|e| e.0);
        for w in edges.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidGraph(format!("duplicate edge id {}", w[0].0)));
            }
        }
        let mut out_edges = vec![Vec::new(); n];
        let mut in_edges = vec![Vec::new(); n];
        let mut list = Vec::with_capacity(edges.len());
        for (idx, (id, tail, head)) in edges.into_iter().enumerate() {
            if tail >= n || head >= n {
                return Err(Error::InvalidGraph(format!("edge {id} has an endpoint out of range")));
            }
            out_edges[tail].push(idx);
            in_edges[head].push(idx);
            list.push(Edge { id: EdgeId(id), tail, head });
        }
        Ok(Self { nodes, edges: list, source, sink, out_edges, in_edges })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn node_name(&self, v: usize) -> &str {
        &self.nodes[v]
    }

    pub fn node_index(&self, name: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n == name)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn edge_index(&self, id: EdgeId) -> Option<usize> {
        self.edges.binary_search_by_key(&id, |e| e.id).ok()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    /// Outgoing edge indices of `v`, ascending by id.
    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    /// Kahn order, or `None` when the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let n = self.nodes.len();
        let mut indeg: Vec<usize> = self.in_edges.iter().map(Vec::len).collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &e in &self.out_edges[v] {
                let h = self.edges[e].head;
                indeg[h] -= 1;
                if indeg[h] == 0 {
                    queue.push_back(h);
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn require_dag(&self) -> Result<Vec<usize>> {
        self.topological_order()
            .ok_or_else(|| Error::InvalidGraph("graph contains a cycle".into()))
    }

    fn reachable(&self, start: usize, forward: bool) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            let adj = if forward { &self.out_edges[v] } else { &self.in_edges[v] };
            for &e in adj {
                let w = if forward { self.edges[e].head } else { self.edges[e].tail };
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// Edge indices that lie on at least one s-t path.
    pub fn edges_on_st_paths(&self) -> Vec<bool> {
        let from_s = self.reachable(self.source, true);
        let to_t = self.reachable(self.sink, false);
        self.edges.iter().map(|e| from_s[e.tail] && to_t[e.head]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum UpperBound {
    Finite(u64),
    Unbounded,
}

impl UpperBound {
    pub fn finite(self) -> Option<u64> {
        match self {
            UpperBound::Finite(v) => Some(v),
            UpperBound::Unbounded => None,
        }
    }

    pub fn is_unbounded(self) -> bool {
        matches!(self, UpperBound::Unbounded)
    }

    pub fn admits(self, value: u64) -> bool {
        match self {
            UpperBound::Finite(u) => value <= u,
            UpperBound::Unbounded => true,
        }
    }

    /// Replaces the unbounded sentinel with `cap`.
    pub fn or_cap(self, cap: u64) -> u64 {
        self.finite().unwrap_or(cap)
    }

    pub fn min(self, other: UpperBound) -> UpperBound {
        match (self, other) {
            (UpperBound::Finite(a), UpperBound::Finite(b)) => UpperBound::Finite(a.min(b)),
            (UpperBound::Finite(a), UpperBound::Unbounded)
            | (UpperBound::Unbounded, UpperBound::Finite(a)) => UpperBound::Finite(a),
            (UpperBound::Unbounded, UpperBound::Unbounded) => UpperBound::Unbounded,
        }
    }

    pub fn max(self, other: UpperBound) -> UpperBound {
        match (self, other) {
            (UpperBound::Finite(a), UpperBound::Finite(b)) => UpperBound::Finite(a.max(b)),
            _ => UpperBound::Unbounded,
        }
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperBound::Finite(v) => write!(f, "{v}"),
            UpperBound::Unbounded => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeBounds {
    pub lower: u64,
    pub upper: UpperBound,
}

impl EdgeBounds {
    pub fn new(lower: u64, upper: UpperBound) -> Self {
        Self { lower, upper }
    }

    pub fn exact(value: u64) -> Self {
        Self { lower: value, upper: UpperBound::Finite(value) }
    }

    pub fn at_least(lower: u64) -> Self {
        Self { lower, upper: UpperBound::Unbounded }
    }

    pub fn contains(&self, value: u64) -> bool {
        value >= self.lower && self.upper.admits(value)
    }

    pub fn is_consistent(&self) -> bool {
        self.upper.admits(self.lower)
    }
}

/// Per-edge `[lower, upper]` intervals, indexed by edge index.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct InexactBounds(pub Vec<EdgeBounds>);

impl InexactBounds {
    pub fn exact(flow: &FlowAssignment) -> Self {
        Self(flow.0.iter().map(|&f| EdgeBounds::exact(f)).collect())
    }

    pub fn lower_only(lower: &[u64]) -> Self {
        Self(lower.iter().map(|&l| EdgeBounds::at_least(l)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lowers(&self) -> Vec<u64> {
        self.0.iter().map(|b| b.lower).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.0.iter().all(|b| b.upper == UpperBound::Finite(b.lower))
    }

    pub fn has_upper_bounds(&self) -> bool {
        self.0.iter().any(|b| !b.upper.is_unbounded())
    }

    pub fn lower_sum(&self) -> u64 {
        self.0.iter().map(|b| b.lower).sum()
    }

    /// Same lower bounds, every upper bound dropped.
    pub fn without_upper(&self) -> Self {
        Self(self.0.iter().map(|b| EdgeBounds::at_least(b.lower)).collect())
    }
}

impl std::ops::Index<usize> for InexactBounds {
    type Output = EdgeBounds;
    fn index(&self, e: usize) -> &EdgeBounds {
        &self.0[e]
    }
}

/// An uncertainty realization has the same shape as a bound vector.
pub type Scenario = InexactBounds;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FlowAssignment(pub Vec<u64>);

impl FlowAssignment {
    pub fn zero(graph: &Graph) -> Self {
        Self(vec![0; graph.edge_count()])
    }

    /// Flow value `|f|`: net inflow into the sink.
    pub fn value(&self, graph: &Graph) -> u64 {
        graph.in_edges(graph.sink()).iter().map(|&e| self.0[e]).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&f| f == 0)
    }
}

/// An s-t path as a sequence of edge indices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn edges(&self) -> &[usize] {
        &self.0
    }

    pub fn is_st_path(&self, graph: &Graph) -> bool {
        let Some(&first) = self.0.first() else {
            return false;
        };
        let Some(&last) = self.0.last() else {
            return false;
        };
        if self.0.iter().any(|&e| e >= graph.edge_count()) {
            return false;
        }
        graph.edge(first).tail == graph.source()
            && graph.edge(last).head == graph.sink()
            && self.0.windows(2).all(|w| graph.edge(w[0]).head == graph.edge(w[1]).tail)
    }

    pub fn edge_ids(&self, graph: &Graph) -> Vec<EdgeId> {
        self.0.iter().map(|&e| graph.edge(e).id).collect()
    }

    pub fn describe(&self, graph: &Graph) -> String {
        let mut out = String::new();
        if let Some(&first) = self.0.first() {
            out.push_str(graph.node_name(graph.edge(first).tail));
        }
        for &e in &self.0 {
            out.push_str(" -> ");
            out.push_str(graph.node_name(graph.edge(e).head));
        }
        out
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WeightedDecomposition {
    pub paths: Vec<Path>,
    pub weights: Vec<u64>,
}

impl WeightedDecomposition {
    pub fn new(paths: Vec<Path>, weights: Vec<u64>) -> Self {
        assert_eq!(paths.len(), weights.len(), "one weight per path");
        Self { paths, weights }
    }

    pub fn len(&self) -> usize {
        self.paths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().sum()
    }

    pub fn sorted_weights(&self) -> Vec<u64> {
        let mut w = self.weights.clone();
        w.sort_unstable();
        w
    }

    /// Per-edge summed weights.
    pub fn coverage(&self, graph: &Graph) -> Vec<u64> {
        let mut cov = vec![0u64; graph.edge_count()];
        for (p, &w) in self.paths.iter().zip(&self.weights) {
            for &e in p.edges() {
                cov[e] += w;
            }
        }
        cov
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Path, u64)> {
        self.paths.iter().zip(self.weights.iter().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Finding {
    Cycle,
    SourceHasIncoming(Vec<EdgeId>),
    SinkHasOutgoing(Vec<EdgeId>),
    DanglingNodes(Vec<String>),
    BoundsLength { expected: usize, found: usize },
    LowerExceedsUpper(Vec<EdgeId>),
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Finding::Cycle => f.write_str("graph contains a directed cycle"),
            Finding::SourceHasIncoming(es) => write!(f, "source has incoming edges {es:?}"),
            Finding::SinkHasOutgoing(es) => write!(f, "sink has outgoing edges {es:?}"),
            Finding::DanglingNodes(ns) => write!(f, "nodes on no s-t path: {ns:?}"),
            Finding::BoundsLength { expected, found } => {
                write!(f, "bounds cover {found} edges, graph has {expected}")
            }
            Finding::LowerExceedsUpper(es) => write!(f, "lower > upper on edges {es:?}"),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_valid() {
            Ok(())
        } else {
            let msg: Vec<String> = self.findings.iter().map(ToString::to_string).collect();
            Err(Error::InvalidInstance(msg.join("; ")))
        }
    }
}

pub fn validate_instance(graph: &Graph, bounds: &InexactBounds) -> ValidationReport {
    let mut findings = Vec::new();
    if graph.topological_order().is_none() {
        findings.push(Finding::Cycle);
    }
    let ids = |es: &[usize]| es.iter().map(|&e| graph.edge(e).id).collect::<Vec<_>>();
    if !graph.in_edges(graph.source()).is_empty() {
        findings.push(Finding::SourceHasIncoming(ids(graph.in_edges(graph.source()))));
    }
    if !graph.out_edges(graph.sink()).is_empty() {
        findings.push(Finding::SinkHasOutgoing(ids(graph.out_edges(graph.sink()))));
    }
    let from_s = graph.reachable(graph.source(), true);
    let to_t = graph.reachable(graph.sink(), false);
    let dangling: Vec<String> = (0..graph.node_count())
        .filter(|&v| !(from_s[v] && to_t[v]))
        .map(|v| graph.node_name(v).to_string())
        .collect();
    if !dangling.is_empty() {
        findings.push(Finding::DanglingNodes(dangling));
    }
    if bounds.len() != graph.edge_count() {
        findings.push(Finding::BoundsLength { expected: graph.edge_count(), found: bounds.len() });
    } else {
        let bad: Vec<EdgeId> = (0..bounds.len())
            .filter(|&e| !bounds[e].is_consistent())
            .map(|e| graph.edge(e).id)
            .collect();
        if !bad.is_empty() {
            findings.push(Finding::LowerExceedsUpper(bad));
        }
    }
    ValidationReport { findings }
}

/// Internal nodes (neither source nor sink) whose inflow differs from outflow.
pub fn check_conservation(graph: &Graph, flow: &FlowAssignment) -> Vec<usize> {
    (0..graph.node_count())
        .filter(|&v| v != graph.source() && v != graph.sink())
        .filter(|&v| {
            let inflow: u64 = graph.in_edges(v).iter().map(|&e| flow.0[e]).sum();
            let outflow: u64 = graph.out_edges(v).iter().map(|&e| flow.0[e]).sum();
            inflow != outflow
        })
        .collect()
}

fn require_conserved(graph: &Graph, flow: &FlowAssignment) -> Result<()> {
    if flow.0.len() != graph.edge_count() {
        return Err(Error::InvalidInstance("flow length does not match edge count".into()));
    }
    let bad = check_conservation(graph, flow);
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::NotConserved {
            nodes: bad.into_iter().map(|v| graph.node_name(v).to_string()).collect(),
        })
    }
}

/// All s-t paths in lexicographic order of their edge-id sequences.
pub fn enumerate_st_paths(graph: &Graph, cap: usize) -> Result<Vec<Path>> {
    graph.require_dag()?;
    let mut paths = Vec::new();
    let mut stack: Vec<(usize, usize)> = vec![(graph.source(), 0)];
    let mut current: Vec<usize> = Vec::new();
    while let Some(top) = stack.last_mut() {
        let (v, next) = *top;
        if v == graph.sink() {
            paths.push(Path(current.clone()));
            if paths.len() > cap {
                return Err(Error::PathExplosion { cap });
            }
            stack.pop();
            current.pop();
            continue;
        }
        let outs = graph.out_edges(v);
        if next < outs.len() {
            top.1 += 1;
            let e = outs[next];
            current.push(e);
            stack.push((graph.edge(e).head, 0));
        } else {
            stack.pop();
            current.pop();
        }
    }
    Ok(paths)
}

/// `|f|` unit-weight paths reproducing `flow`.
pub fn trivial_decomposition(graph: &Graph, flow: &FlowAssignment) -> Result<WeightedDecomposition> {
    let weighted = flow_to_paths(graph, flow)?;
    let mut paths = Vec::new();
    for (p, w) in weighted.iter() {
        for _ in 0..w {
            paths.push(p.clone());
        }
    }
    let weights = vec![1; paths.len()];
    Ok(WeightedDecomposition::new(paths, weights))
}

/// Greedy path peeling: repeatedly walk from s along the smallest-id edge with
/// positive residual and remove the bottleneck amount. Each step zeroes at
/// least one edge, so at most `|E|` paths are produced.
pub fn flow_to_paths(graph: &Graph, flow: &FlowAssignment) -> Result<WeightedDecomposition> {
    require_conserved(graph, flow)?;
    graph.require_dag()?;
    let mut residual = flow.0.clone();
    let mut paths = Vec::new();
    let mut weights = Vec::new();
    loop {
        let Some(&first) = graph.out_edges(graph.source()).iter().find(|&&e| residual[e] > 0) else {
            break;
        };
        let mut path = vec![first];
        let mut v = graph.edge(first).head;
        while v != graph.sink() {
            let next = graph
                .out_edges(v)
                .iter()
                .copied()
                .find(|&e| residual[e] > 0)
                .ok_or_else(|| Error::NotConserved { nodes: vec![graph.node_name(v).to_string()] })?;
            path.push(next);
            v = graph.edge(next).head;
        }
        let w = path.iter().map(|&e| residual[e]).min().expect("non-empty path");
        for &e in &path {
            residual[e] -= w;
        }
        paths.push(Path(path));
        weights.push(w);
    }
    if residual.iter().any(|&r| r > 0) {
        // Leftover flow not reachable from s: circulation-free DAG makes this
        // a conservation failure at some node.
        return Err(Error::NotConserved { nodes: vec![] });
    }
    Ok(WeightedDecomposition::new(paths, weights))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub feasible: bool,
    pub objective: f64,
    pub coverage: Vec<u64>,
}

pub fn evaluate(
    graph: &Graph,
    decomp: &WeightedDecomposition,
    bounds: &InexactBounds,
    a_y: f64,
    a_w: f64,
) -> Evaluation {
    let coverage = decomp.coverage(graph);
    let paths_ok = decomp.paths.iter().all(|p| p.is_st_path(graph)) && decomp.weights.iter().all(|&w| w >= 1);
    let within = bounds.len() == coverage.len()
        && coverage.iter().zip(&bounds.0).all(|(&c, b)| b.contains(c));
    let objective = a_y * decomp.len() as f64 + a_w * decomp.total_weight() as f64;
    Evaluation { feasible: paths_ok && within, objective, coverage }
}

/// Multiset of paths keyed by edge sequence; used for pooling.
pub fn path_multiset(decomp: &WeightedDecomposition) -> BTreeMap<Path, u64> {
    let mut m = BTreeMap::new();
    for (p, w) in decomp.iter() {
        *m.entry(p.clone()).or_insert(0) += w;
    }
    m
}

pub(crate) fn distinct_paths<'a>(it: impl IntoIterator<Item = &'a Path>) -> Vec<Path> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for p in it {
        if seen.insert(p.clone()) {
            out.push(p.clone());
        }
    }
    out
}

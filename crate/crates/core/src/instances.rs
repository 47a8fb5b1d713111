//! Bundled instances and synthetic DAG families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{EdgeBounds, FlowAssignment, Graph, InexactBounds, Path, UpperBound, WeightedDecomposition};
use crate::io::{parse_instance, Instance};
use crate::scenario_gen::gen_hard_instance;

const SMALL: &str = include_str!("../instances/small.json");

pub const BUNDLED: [&str; 5] = ["small", "layered", "series_parallel", "random", "three_partition"];

/// The seven-node network with twelve edges and flow value 10 used throughout
/// the tests.
pub fn example_one() -> (Graph, FlowAssignment) {
    let inst = parse_instance(SMALL).expect("bundled instance parses");
    let flow = FlowAssignment(inst.bounds.lowers());
    (inst.graph, flow)
}

/// Five paths with weights 2, 2, 2, 1, 3 that reproduce the flow of
/// [`example_one`].
pub fn example_one_decomposition(graph: &Graph) -> WeightedDecomposition {
    let path = |ids: &[u32]| {
        Path(ids.iter().map(|&id| graph.edge_index(crate::graph::EdgeId(id)).expect("edge exists")).collect())
    };
    WeightedDecomposition::new(
        vec![
            path(&[0, 4, 9, 11]),
            path(&[0, 3, 8, 11]),
            path(&[1, 6, 11]),
            path(&[1, 5, 8, 11]),
            path(&[2, 7, 10]),
        ],
        vec![2, 2, 2, 1, 3],
    )
}

pub fn bundled(name: &str) -> Result<Instance> {
    match name {
        "small" => parse_instance(SMALL),
        "layered" => Ok(layered(3, 3, 6, 1)),
        "series_parallel" => Ok(series_parallel(8, 5, 2)),
        "random" => Ok(random_dag(7, 4, 5, 3)),
        "three_partition" => {
            let (graph, lower) = gen_hard_instance(2, 10, &[3, 3, 4, 3, 3, 4])?;
            Ok(Instance::new("three_partition", graph, InexactBounds::lower_only(&lower)))
        }
        other => Err(Error::InvalidConfig(format!("unknown bundled instance `{other}`"))),
    }
}

fn random_walk(graph: &Graph, rng: &mut impl Rng) -> Path {
    let mut v = graph.source();
    let mut edges = Vec::new();
    while v != graph.sink() {
        let e = *graph.out_edges(v).choose(rng).expect("every node reaches the sink");
        edges.push(e);
        v = graph.edge(e).head;
    }
    Path(edges)
}

/// Exact flow made of `paths` random walks with weights in `1..=max_weight`.
fn random_flow(graph: &Graph, paths: usize, max_weight: u64, rng: &mut impl Rng) -> FlowAssignment {
    let mut flow = vec![0u64; graph.edge_count()];
    for _ in 0..paths {
        let p = random_walk(graph, rng);
        let w = rng.gen_range(1..=max_weight);
        for &e in p.edges() {
            flow[e] += w;
        }
    }
    FlowAssignment(flow)
}

/// Nodes are created in topological order `0..n` with `0 = s`, `n-1 = t`.
/// Every inner node receives one edge from an earlier node and one to a later
/// node, then `extra` random forward edges are added.
fn random_topology(n: usize, extra: usize, rng: &mut impl Rng) -> Graph {
    assert!(n >= 2);
    let names: Vec<String> = (0..n)
        .map(|i| match i {
            0 => "s".to_string(),
            i if i == n - 1 => "t".to_string(),
            i => format!("v{i}"),
        })
        .collect();
    let mut edges = Vec::new();
    for v in 1..n - 1 {
        edges.push((rng.gen_range(0..v), v));
        edges.push((v, rng.gen_range(v + 1..n)));
    }
    if n == 2 {
        edges.push((0, 1));
    }
    for _ in 0..extra {
        let u = rng.gen_range(0..n - 1);
        let v = rng.gen_range(u + 1..n);
        edges.push((u, v));
    }
    let triples = edges.into_iter().enumerate().map(|(i, (u, v))| (i as u32, u, v)).collect();
    Graph::from_indices(names, triples, 0, n - 1).expect("generated graph is well formed")
}

pub fn random_dag(nodes: usize, extra_edges: usize, paths: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = random_topology(nodes.max(2), extra_edges, &mut rng);
    let flow = random_flow(&graph, paths, 3, &mut rng);
    Instance::exact(format!("random_{nodes}_{extra_edges}_{seed}"), graph, &flow)
}

pub fn layered(layers: usize, width: usize, paths: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = vec!["s".to_string()];
    for l in 0..layers {
        for j in 0..width {
            names.push(format!("l{l}_{j}"));
        }
    }
    names.push("t".to_string());
    let node = |l: usize, j: usize| 1 + l * width + j;
    let t = names.len() - 1;
    let mut edges = Vec::new();
    for j in 0..width {
        edges.push((0, node(0, j)));
    }
    for l in 0..layers.saturating_sub(1) {
        let mut has_in = vec![false; width];
        for j in 0..width {
            let k = rng.gen_range(0..width);
            has_in[k] = true;
            edges.push((node(l, j), node(l + 1, k)));
            if rng.gen_bool(0.5) {
                let k2 = rng.gen_range(0..width);
                if k2 != k {
                    has_in[k2] = true;
                    edges.push((node(l, j), node(l + 1, k2)));
                }
            }
        }
        for (k, seen) in has_in.into_iter().enumerate() {
            if !seen {
                edges.push((node(l, rng.gen_range(0..width)), node(l + 1, k)));
            }
        }
    }
    for j in 0..width {
        edges.push((node(layers - 1, j), t));
    }
    let triples = edges.into_iter().enumerate().map(|(i, (u, v))| (i as u32, u, v)).collect();
    let graph = Graph::from_indices(names, triples, 0, t).expect("layered graph is well formed");
    let flow = random_flow(&graph, paths, 3, &mut rng);
    Instance::exact(format!("layered_{layers}x{width}_{seed}"), graph, &flow)
}

/// Starts from a single edge and applies `operations` random series or
/// parallel splits.
pub fn series_parallel(operations: usize, paths: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut names = vec!["s".to_string(), "t".to_string()];
    let mut edges: Vec<(usize, usize)> = vec![(0, 1)];
    for _ in 0..operations {
        let i = rng.gen_range(0..edges.len());
        let (u, v) = edges[i];
        if rng.gen_bool(0.5) {
            let mid = names.len();
            names.push(format!("m{mid}"));
            edges[i] = (u, mid);
            edges.push((mid, v));
        } else {
            edges.push((u, v));
        }
    }
    let triples = edges.into_iter().enumerate().map(|(i, (u, v))| (i as u32, u, v)).collect();
    let graph = Graph::from_indices(names, triples, 0, 1).expect("series-parallel graph is well formed");
    let flow = random_flow(&graph, paths, 3, &mut rng);
    Instance::exact(format!("series_parallel_{operations}_{seed}"), graph, &flow)
}

#[derive(Debug, Clone, Copy)]
pub struct RandomSpec {
    pub max_nodes: usize,
    pub max_edges: usize,
    pub max_bound: u64,
    /// Lower equals upper on every edge.
    pub exact: bool,
    pub unbounded_prob: f64,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self { max_nodes: 6, max_edges: 10, max_bound: 4, exact: false, unbounded_prob: 0.2 }
    }
}

/// Small random instance for oracle comparisons. Bounds are perturbed around
/// a random path flow, so most but not all instances are feasible.
pub fn random_small_instance(spec: RandomSpec, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(3..=spec.max_nodes.max(3));
    let base = 2 * (n - 2);
    let extra = rng.gen_range(0..=spec.max_edges.saturating_sub(base).min(3));
    let graph = random_topology(n, extra, &mut rng);
    let paths = rng.gen_range(1..=3);
    let flow = random_flow(&graph, paths, 2, &mut rng);
    let cap = spec.max_bound;
    let bounds = flow
        .0
        .iter()
        .map(|&f| {
            let f = f.min(cap);
            if spec.exact {
                return EdgeBounds::exact(f);
            }
            let lower = f.saturating_sub(rng.gen_range(0..=1));
            let upper = if rng.gen_bool(spec.unbounded_prob) {
                UpperBound::Unbounded
            } else {
                UpperBound::Finite((f + rng.gen_range(0..=2)).min(cap).max(lower))
            };
            EdgeBounds::new(lower, upper)
        })
        .collect();
    Instance::new(format!("tiny_{seed}"), graph, InexactBounds(bounds))
}

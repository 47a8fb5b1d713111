//! Seeded scenario generation with a deviation budget, and the 3-PARTITION
//! hard-instance family.
//!
//! Randomness comes from `ChaCha8Rng::seed_from_u64`, which produces the same
//! stream on every platform. Candidates are drawn one after another from that
//! stream, so generating `n` scenarios yields a prefix of generating `m > n`
//! with the same seed.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{enumerate_st_paths, EdgeBounds, EdgeId, Graph, InexactBounds, Path, Scenario, UpperBound};
use crate::io::ScenarioFile;

pub const PATH_ENUMERATION_CAP: usize = 200_000;

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    /// Paths per scenario.
    pub p: usize,
    pub gamma_prime: f64,
    pub count: usize,
    pub seed: u64,
    /// Edges whose lower bound is always 0.
    pub aux_edges: Vec<EdgeId>,
    /// Rejected candidates tolerated before giving up; `None` means
    /// `1000 · count`.
    pub max_rejections: Option<usize>,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self { p: 10, gamma_prime: 0.2, count: 10, seed: 0, aux_edges: Vec::new(), max_rejections: None }
    }
}

impl GenConfig {
    /// Upper-bound slack added on top of the sampled flow, `⌈p/2⌉`.
    pub fn delta(&self) -> u64 {
        self.p.div_ceil(2) as u64
    }

    fn validate(&self) -> Result<()> {
        if self.p == 0 || self.count == 0 {
            return Err(Error::InvalidConfig("p and count must be at least 1".into()));
        }
        if !(self.gamma_prime >= 0.0) {
            return Err(Error::InvalidConfig("gamma' must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedSet {
    pub nominal: Scenario,
    pub scenarios: Vec<Scenario>,
    /// The `p` paths each accepted scenario was built from.
    pub generators: Vec<Vec<Path>>,
    pub gamma: f64,
    pub rejections: usize,
}

impl GeneratedSet {
    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile { nominal: Some(self.nominal.clone()), gamma: Some(self.gamma), scenarios: self.scenarios.clone() }
    }

    /// First `n` scenarios with their generators.
    pub fn prefix(&self, n: usize) -> GeneratedSet {
        let n = n.min(self.scenarios.len());
        GeneratedSet {
            nominal: self.nominal.clone(),
            scenarios: self.scenarios[..n].to_vec(),
            generators: self.generators[..n].to_vec(),
            gamma: self.gamma,
            rejections: self.rejections,
        }
    }
}

/// `Σ_e |l_e - l*_e| + |u_e - u*_e|` over edges with finite uppers on both sides.
pub fn deviation(scenario: &Scenario, nominal: &Scenario) -> u64 {
    scenario
        .0
        .iter()
        .zip(&nominal.0)
        .map(|(a, b)| {
            let upper = match (a.upper, b.upper) {
                (UpperBound::Finite(x), UpperBound::Finite(y)) => x.abs_diff(y),
                _ => 0,
            };
            a.lower.abs_diff(b.lower) + upper
        })
        .sum()
}

fn sample_flow(graph: &Graph, paths: &[Path], p: usize, rng: &mut ChaCha8Rng) -> (Vec<u64>, Vec<Path>) {
    let picked: Vec<Path> = sample(rng, paths.len(), p).into_iter().map(|i| paths[i].clone()).collect();
    let mut flow = vec![0u64; graph.edge_count()];
    for path in &picked {
        for &e in path.edges() {
            flow[e] += 1;
        }
    }
    (flow, picked)
}

pub fn generate(graph: &Graph, config: &GenConfig) -> Result<GeneratedSet> {
    config.validate()?;
    let paths = enumerate_st_paths(graph, PATH_ENUMERATION_CAP)?;
    if paths.len() < config.p {
        return Err(Error::TooFewPaths { available: paths.len(), required: config.p });
    }
    let mut aux = vec![false; graph.edge_count()];
    for id in &config.aux_edges {
        let e = graph.edge_index(*id).ok_or_else(|| Error::InvalidConfig(format!("unknown auxiliary edge {id}")))?;
        aux[e] = true;
    }
    let delta = config.delta();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let (nominal_flow, _) = sample_flow(graph, &paths, config.p, &mut rng);
    let nominal = InexactBounds(
        nominal_flow
            .iter()
            .enumerate()
            .map(|(e, &f)| EdgeBounds::new(if aux[e] { 0 } else { f }, UpperBound::Finite(f + delta)))
            .collect(),
    );
    let total: u64 = nominal.0.iter().map(|b| b.lower + b.upper.or_cap(0)).sum();
    let gamma = config.gamma_prime * total as f64;

    let limit = config.max_rejections.unwrap_or(1000 * config.count);
    let mut scenarios = Vec::with_capacity(config.count);
    let mut generators = Vec::with_capacity(config.count);
    let mut rejections = 0;
    while scenarios.len() < config.count {
        let (flow, picked) = sample_flow(graph, &paths, config.p, &mut rng);
        let candidate = InexactBounds(
            flow.iter()
                .enumerate()
                .map(|(e, &f)| {
                    let lower = if aux[e] { 0 } else { rng.gen_range(f.saturating_sub(2)..=f) };
                    EdgeBounds::new(lower, UpperBound::Finite(f + delta))
                })
                .collect(),
        );
        if deviation(&candidate, &nominal) as f64 <= gamma {
            scenarios.push(candidate);
            generators.push(picked);
        } else {
            rejections += 1;
            if rejections > limit {
                return Err(Error::RejectionLimit { attempts: rejections });
            }
        }
    }
    Ok(GeneratedSet { nominal, scenarios, generators, gamma, rejections })
}

/// Nodes `s, o, t`; one `s->o` edge per item with lower bound equal to its
/// size and `b` parallel `o->t` edges with lower bound `B`. No upper bounds.
pub fn gen_hard_instance(b: usize, big_b: u64, sizes: &[u64]) -> Result<(Graph, Vec<u64>)> {
    if b == 0 || big_b == 0 {
        return Err(Error::InvalidConfig("b and B must be positive".into()));
    }
    if sizes.len() != 3 * b {
        return Err(Error::InvalidConfig(format!("expected {} sizes, got {}", 3 * b, sizes.len())));
    }
    if sizes.contains(&0) {
        return Err(Error::InvalidConfig("sizes must be positive".into()));
    }
    let sum: u64 = sizes.iter().sum();
    let expected = b as u64 * big_b;
    if sum != expected {
        return Err(Error::BadSizes { sum, expected });
    }
    let mut edges = Vec::with_capacity(4 * b);
    for i in 0..3 * b {
        edges.push((i as u32, 0usize, 1usize));
    }
    for j in 0..b {
        edges.push(((3 * b + j) as u32, 1, 2));
    }
    let names = vec!["s".to_string(), "o".to_string(), "t".to_string()];
    let graph = Graph::from_indices(names, edges, 0, 2)?;
    let mut lower = sizes.to_vec();
    lower.extend(std::iter::repeat_n(big_b, b));
    Ok((graph, lower))
}

/// Sizes outside the open interval `(B/4, B/3)` admit subsets of other
/// cardinalities summing to `B`; reported, not rejected.
pub fn three_partition_warning(big_b: u64, sizes: &[u64]) -> Option<String> {
    let bad: Vec<u64> = sizes.iter().copied().filter(|&s| !(4 * s > big_b && 3 * s < big_b)).collect();
    (!bad.is_empty()).then(|| format!("sizes {bad:?} lie outside the open interval (B/4, B/3) for B = {big_b}"))
}

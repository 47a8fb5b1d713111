//! Exhaustive reference solver over multisets of weighted paths.

use crate::error::Result;
use crate::graph::{enumerate_st_paths, Graph, InexactBounds, Path, WeightedDecomposition};

pub const BRUTE_FORCE_PATH_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum BruteForceResult {
    Optimal { decomposition: WeightedDecomposition, objective: f64 },
    Infeasible,
}

impl BruteForceResult {
    pub fn objective(&self) -> Option<f64> {
        match self {
            BruteForceResult::Optimal { objective, .. } => Some(*objective),
            BruteForceResult::Infeasible => None,
        }
    }
}

/// Global optimum of `a_y·k + a_w·Σw` over at most `k_max` paths with
/// weights in `[1, w_max]`.
pub fn brute_force(
    graph: &Graph,
    bounds: &InexactBounds,
    a_y: f64,
    a_w: f64,
    k_max: usize,
    w_max: u64,
) -> Result<BruteForceResult> {
    let paths = enumerate_st_paths(graph, BRUTE_FORCE_PATH_CAP)?;
    Ok(brute_force_over(graph, &paths, bounds, a_y, a_w, k_max, w_max))
}

/// Same search restricted to the candidate `paths`.
pub fn brute_force_over(
    graph: &Graph,
    paths: &[Path],
    bounds: &InexactBounds,
    a_y: f64,
    a_w: f64,
    k_max: usize,
    w_max: u64,
) -> BruteForceResult {
    brute_force_all(graph, paths, std::slice::from_ref(bounds), a_y, a_w, k_max, w_max)
}

/// Optimum over decompositions that are feasible for every bound vector in
/// `scenarios` simultaneously, each checked on its own.
pub fn brute_force_all(
    graph: &Graph,
    paths: &[Path],
    scenarios: &[InexactBounds],
    a_y: f64,
    a_w: f64,
    k_max: usize,
    w_max: u64,
) -> BruteForceResult {
    let mut search = Enumeration {
        paths,
        scenarios,
        a_y,
        a_w,
        k_max,
        w_max,
        coverage: vec![0; graph.edge_count()],
        chosen: Vec::new(),
        best: None,
    };
    search.run(0, 0.0);
    match search.best {
        Some((objective, chosen)) => {
            let (p, w): (Vec<Path>, Vec<u64>) = chosen.into_iter().map(|(i, w)| (paths[i].clone(), w)).unzip();
            BruteForceResult::Optimal { decomposition: WeightedDecomposition::new(p, w), objective }
        }
        None => BruteForceResult::Infeasible,
    }
}

struct Enumeration<'a> {
    paths: &'a [Path],
    scenarios: &'a [InexactBounds],
    a_y: f64,
    a_w: f64,
    k_max: usize,
    w_max: u64,
    coverage: Vec<u64>,
    chosen: Vec<(usize, u64)>,
    best: Option<(f64, Vec<(usize, u64)>)>,
}

impl Enumeration<'_> {
    fn max_deficit(&self) -> u64 {
        self.scenarios
            .iter()
            .flat_map(|s| self.coverage.iter().zip(&s.0).map(|(&c, b)| b.lower.saturating_sub(c)))
            .max()
            .unwrap_or(0)
    }

    /// Pairs are visited in non-decreasing `(path, weight)` order, so each
    /// multiset is generated once.
    fn run(&mut self, from: usize, objective: f64) {
        let deficit = self.max_deficit();
        if deficit == 0 {
            if self.best.as_ref().is_none_or(|(b, _)| objective < *b) {
                self.best = Some((objective, self.chosen.clone()));
            }
            return;
        }
        let remaining = (self.k_max - self.chosen.len()) as u64;
        if remaining * self.w_max < deficit {
            return;
        }
        let optimistic = objective + self.a_w * deficit as f64 + self.a_y * deficit.div_ceil(self.w_max) as f64;
        if let Some((b, _)) = &self.best {
            if optimistic >= *b {
                return;
            }
        }
        let pairs = self.paths.len() as u64 * self.w_max;
        for pair in from as u64..pairs {
            let p = (pair / self.w_max) as usize;
            let w = pair % self.w_max + 1;
            let fits = self.paths[p]
                .edges()
                .iter()
                .all(|&e| self.scenarios.iter().all(|s| s[e].upper.admits(self.coverage[e] + w)));
            if !fits {
                continue;
            }
            for &e in self.paths[p].edges() {
                self.coverage[e] += w;
            }
            self.chosen.push((p, w));
            self.run(pair as usize, objective + self.a_y + self.a_w * w as f64);
            self.chosen.pop();
            for &e in self.paths[p].edges() {
                self.coverage[e] -= w;
            }
        }
    }
}

/// Smallest total weight using at most `k` paths from `paths`. `None` when
/// no choice meets the bounds.
pub fn min_weight_with_paths(graph: &Graph, paths: &[Path], bounds: &InexactBounds, k: usize, w_max: u64) -> Option<u64> {
    if bounds.0.iter().all(|b| b.lower == 0) {
        return Some(0);
    }
    if k == 0 {
        return None;
    }
    match brute_force_over(graph, paths, bounds, 0.0, 1.0, k, w_max) {
        BruteForceResult::Optimal { objective, .. } => Some(objective.round() as u64),
        BruteForceResult::Infeasible => None,
    }
}

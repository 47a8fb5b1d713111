//! Grid runs of MA, LA and the naive method over generated scenario sets.
//!
//! For every `(Γ′, seed)` pair one set of `max(sizes)` scenarios is generated
//! and each size uses a prefix of it, so the sets for one pair are nested.

use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use crate::adjustable::{solve_adjustable, Formulation};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, Graph};
use crate::milp::SolverConfig;
use crate::robust::DiscreteUncertaintySet;
use crate::scenario_gen::{generate, GenConfig};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResultRow {
    pub instance: String,
    pub method: String,
    #[serde(rename = "|U|")]
    pub scenarios: usize,
    #[serde(rename = "Γ′")]
    pub gamma_prime: f64,
    pub seed: u64,
    #[serde(rename = "Y")]
    pub y: Option<usize>,
    #[serde(rename = "W")]
    pub w: Option<u64>,
    pub objective: Option<f64>,
    pub iterations: usize,
    pub runtime: f64,
    pub status: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRow {
    pub instance: String,
    pub method: String,
    #[serde(rename = "|U|")]
    pub scenarios: usize,
    #[serde(rename = "Γ′")]
    pub gamma_prime: Option<f64>,
    pub seed: Option<u64>,
    pub iteration: usize,
    pub lb: f64,
    pub ub: f64,
    pub raw_ub: Option<f64>,
    pub worst: Option<usize>,
    pub infeasible: Option<usize>,
    pub elapsed: f64,
}

/// Per-cell comparison of the three methods; ratios are empty when a method
/// failed or the denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub instance: String,
    #[serde(rename = "|U|")]
    pub scenarios: usize,
    #[serde(rename = "Γ′")]
    pub gamma_prime: f64,
    pub seed: u64,
    pub y_ma: Option<usize>,
    pub y_la: Option<usize>,
    pub y_naive: Option<usize>,
    pub naive_over_ma: Option<f64>,
    pub la_gap_share: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub sizes: Vec<usize>,
    pub gamma_primes: Vec<f64>,
    pub seeds: Vec<u64>,
    pub p: usize,
    pub methods: Vec<Formulation>,
    pub aux_edges: Vec<EdgeId>,
    pub solver: SolverConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sizes: vec![5, 10, 50],
            gamma_primes: vec![0.1, 0.2, 0.3],
            seeds: vec![0],
            p: 10,
            methods: vec![Formulation::Ma, Formulation::La, Formulation::Naive],
            aux_edges: Vec::new(),
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentOutput {
    pub rows: Vec<ResultRow>,
    pub iterations: Vec<IterationRow>,
    pub summaries: Vec<SummaryRow>,
}

/// Runs the grid cell by cell and hands each finished row to `on_row`, so a
/// caller can flush partial results. Rows in the output are sorted by
/// instance, method, size, Γ′ and seed.
pub fn run_experiment(
    graph: &Graph,
    instance: &str,
    config: &ExperimentConfig,
    mut on_row: impl FnMut(&ResultRow) -> Result<()>,
) -> Result<ExperimentOutput> {
    if config.sizes.is_empty() || config.gamma_primes.is_empty() || config.seeds.is_empty() {
        return Err(Error::InvalidConfig("experiment grid is empty".into()));
    }
    let largest = *config.sizes.iter().max().expect("non-empty");
    let mut out = ExperimentOutput::default();
    for &gamma_prime in &config.gamma_primes {
        for &seed in &config.seeds {
            let gen = GenConfig {
                p: config.p,
                gamma_prime,
                count: largest,
                seed,
                aux_edges: config.aux_edges.clone(),
                max_rejections: None,
            };
            let full = generate(graph, &gen)?;
            for &size in &config.sizes {
                let set = DiscreteUncertaintySet { scenarios: full.prefix(size).scenarios };
                let mut cell = Vec::new();
                for &method in &config.methods {
                    let start = Instant::now();
                    let solved = solve_adjustable(method, graph, &set, &config.solver);
                    let runtime = start.elapsed().as_secs_f64();
                    let mut row = ResultRow {
                        instance: instance.to_string(),
                        method: method.as_str().to_string(),
                        scenarios: size,
                        gamma_prime,
                        seed,
                        y: None,
                        w: None,
                        objective: None,
                        iterations: 0,
                        runtime,
                        status: String::new(),
                    };
                    match solved {
                        Ok((result, state)) => {
                            row.y = Some(result.path_count);
                            row.w = Some(result.weight);
                            row.objective = Some(result.objective);
                            row.status = result.status.as_str().to_string();
                            if let Some(state) = state {
                                row.iterations = state.iteration;
                                out.iterations.extend(state.log.iter().map(|r| IterationRow {
                                    instance: instance.to_string(),
                                    method: method.as_str().to_string(),
                                    scenarios: size,
                                    gamma_prime: Some(gamma_prime),
                                    seed: Some(seed),
                                    iteration: r.iteration,
                                    lb: r.lb,
                                    ub: r.ub,
                                    raw_ub: r.raw_ub,
                                    worst: r.worst,
                                    infeasible: r.infeasible,
                                    elapsed: r.elapsed.as_secs_f64(),
                                }));
                            }
                        }
                        Err(e) => row.status = error_status(&e).to_string(),
                    }
                    on_row(&row)?;
                    cell.push(row);
                }
                out.summaries.push(summarize(instance, size, gamma_prime, seed, &cell));
                out.rows.extend(cell);
            }
        }
    }
    out.rows.sort_by(|a, b| {
        (&a.instance, &a.method, a.scenarios)
            .cmp(&(&b.instance, &b.method, b.scenarios))
            .then(a.gamma_prime.total_cmp(&b.gamma_prime))
            .then(a.seed.cmp(&b.seed))
    });
    Ok(out)
}

fn error_status(e: &Error) -> &'static str {
    match e {
        Error::Infeasible | Error::InfeasibleAt { .. } => "infeasible",
        Error::TimeLimit => "time_limit",
        _ => "error",
    }
}

fn summarize(instance: &str, size: usize, gamma_prime: f64, seed: u64, cell: &[ResultRow]) -> SummaryRow {
    let find = |m: Formulation| cell.iter().find(|r| r.method == m.as_str() && r.y.is_some());
    let (ma, la, naive) = (find(Formulation::Ma), find(Formulation::La), find(Formulation::Naive));
    let naive_over_ma = match (naive.and_then(|r| r.objective), ma.and_then(|r| r.objective)) {
        (Some(n), Some(m)) if m > 0.0 => Some(n / m),
        _ => None,
    };
    let la_gap_share = match (ma.and_then(|r| r.y), la.and_then(|r| r.y), naive.and_then(|r| r.y)) {
        (Some(m), Some(l), Some(n)) if n != m => Some((l as f64 - m as f64) / (n as f64 - m as f64)),
        _ => None,
    };
    SummaryRow {
        instance: instance.to_string(),
        scenarios: size,
        gamma_prime,
        seed,
        y_ma: ma.and_then(|r| r.y),
        y_la: la.and_then(|r| r.y),
        y_naive: naive.and_then(|r| r.y),
        naive_over_ma,
        la_gap_share,
    }
}

/// Writes serializable records as CSV with a header row.
pub fn write_csv<T: Serialize>(writer: impl Write, records: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in records {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| Error::Io(e.to_string()))?;
    Ok(())
}

pub const RESULT_HEADER: &str = "instance,method,|U|,Γ′,seed,Y,W,objective,iterations,runtime,status";

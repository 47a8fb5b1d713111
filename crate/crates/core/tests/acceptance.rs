//! Acceptance suite. Runs every criterion in order, prints one PASS/FAIL line
//! each and exits non-zero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flowdec::adjustable::{ccg_solve, naive_solve, Formulation};
use flowdec::graph::{enumerate_st_paths, evaluate, EdgeBounds, FlowAssignment, InexactBounds, Path, UpperBound};
use flowdec::instances::{bundled, example_one, random_small_instance, RandomSpec};
use flowdec::io::write_scenarios;
use flowdec::milp::brute::{brute_force_all, min_weight_with_paths, BRUTE_FORCE_PATH_CAP};
use flowdec::milp::{brute_force, default_wmax, solve_decomposition, variant_for, ModelVariant, SolveStatus, SolverConfig};
use flowdec::poly::{solve_path_min_no_ub, solve_weight_min, Variant};
use flowdec::robust::{solve_scenario, solve_strict, DiscreteUncertaintySet, UncertaintySet};
use flowdec::scenario_gen::{deviation, gen_hard_instance, generate, GenConfig, GeneratedSet};
use flowdec::{Error, Graph, Scenario, WeightedDecomposition};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed <= limit, || format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn milp_objective(graph: &Graph, bounds: &InexactBounds, a_y: f64, a_w: f64, config: &SolverConfig) -> Result<Option<f64>, String> {
    match solve_decomposition(graph, bounds, a_y, a_w, config, variant_for(bounds)) {
        Ok((res, d)) => {
            ensure(res.status == SolveStatus::Optimal, || format!("status {}", res.status))?;
            ensure(evaluate(graph, &d, bounds, a_y, a_w).feasible, || "infeasible decomposition".into())?;
            Ok(Some(res.objective))
        }
        Err(Error::Infeasible) => Ok(None),
        Err(e) => Err(e.to_string()),
    }
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let inst = bundled("small").map_err(|e| e.to_string())?;
    let (res, d) = solve_decomposition(&inst.graph, &inst.bounds, 1.0, 0.0, &SolverConfig::default(), ModelVariant::Exact)
        .map_err(|e| e.to_string())?;
    within(start.elapsed(), Duration::from_secs(10))?;
    ensure(res.status == SolveStatus::Optimal && d.len() == 5, || format!("k = {}", d.len()))?;
    ensure(d.sorted_weights() == vec![1, 2, 2, 2, 3], || format!("weights {:?}", d.sorted_weights()))?;
    Ok(format!("k=5, weights {:?}", d.sorted_weights()))
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let config = SolverConfig { kbar: Some(6), wmax: Some(4), ..Default::default() };
    let mut compared = 0;
    let mut infeasible = 0;
    for seed in 0..100 {
        let inst = random_small_instance(RandomSpec::default(), seed);
        for (a_y, a_w) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)] {
            let milp = milp_objective(&inst.graph, &inst.bounds, a_y, a_w, &config).map_err(|e| format!("seed {seed}: {e}"))?;
            let oracle = brute_force(&inst.graph, &inst.bounds, a_y, a_w, 6, 4).map_err(|e| e.to_string())?.objective();
            ensure(milp == oracle, || format!("seed {seed} ({a_y},{a_w}): milp {milp:?}, brute force {oracle:?}"))?;
            compared += 1;
            infeasible += milp.is_none() as usize;
        }
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{compared} comparisons on 100 instances ({infeasible} infeasible on both sides)"))
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let spec = RandomSpec::default();
    let mut feasible = 0;
    for seed in 0..50 {
        let inst = random_small_instance(spec, 1000 + seed);
        let variant = if inst.bounds.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
        let poly = match solve_weight_min(&inst.graph, &inst.bounds, variant) {
            Ok(d) => {
                ensure(evaluate(&inst.graph, &d, &inst.bounds, 0.0, 1.0).feasible, || format!("seed {seed}: infeasible output"))?;
                Some(d.total_weight() as f64)
            }
            Err(Error::Infeasible) => None,
            Err(e) => return Err(e.to_string()),
        };
        // Any decomposition of weight W splits into W unit paths, and a
        // minimum flow never exceeds the total lower bound.
        let k = inst.bounds.lower_sum().max(1) as usize;
        let oracle = brute_force(&inst.graph, &inst.bounds, 0.0, 1.0, k, 1).map_err(|e| format!("seed {seed}: brute force: {e}"))?.objective();
        ensure(poly == oracle, || format!("seed {seed}: poly {poly:?}, brute force {oracle:?}"))?;
        feasible += poly.is_some() as usize;
    }
    for seed in 0..20 {
        let inst = random_small_instance(RandomSpec { exact: true, max_bound: 100, ..spec }, 2000 + seed);
        let d = solve_weight_min(&inst.graph, &inst.bounds, Variant::WithUpper).map_err(|e| format!("exact seed {seed}: {e}"))?;
        let value = FlowAssignment(inst.bounds.lowers()).value(&inst.graph);
        ensure(d.total_weight() == value, || format!("exact seed {seed}: {} vs |f| = {value}", d.total_weight()))?;
    }
    let (g, f) = example_one();
    let d = solve_weight_min(&g, &InexactBounds::exact(&f), Variant::WithUpper).map_err(|e| e.to_string())?;
    ensure(d.total_weight() == 10, || format!("small instance weight {}", d.total_weight()))?;
    let cover = solve_path_min_no_ub(&g, &f.0).map_err(|e| e.to_string())?;
    ensure(cover.len() == 5, || format!("path cover on small has {} paths", cover.len()))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("50 inexact ({feasible} feasible), 20 exact, path cover = 5"))
}

fn perturbed_scenarios(base: &InexactBounds, count: usize, rng: &mut ChaCha8Rng) -> Vec<Scenario> {
    (0..count)
        .map(|_| {
            InexactBounds(
                base.0
                    .iter()
                    .map(|b| {
                        let lower = (b.lower + rng.gen_range(0..=1)).saturating_sub(rng.gen_range(0..=1)).min(4);
                        let upper = match b.upper {
                            UpperBound::Finite(u) => UpperBound::Finite((u + rng.gen_range(0..=1)).min(4).max(lower)),
                            UpperBound::Unbounded if rng.gen_bool(0.3) => UpperBound::Finite(4),
                            UpperBound::Unbounded => UpperBound::Unbounded,
                        };
                        EdgeBounds::new(lower, upper)
                    })
                    .collect(),
            )
        })
        .collect()
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let config = SolverConfig { kbar: Some(6), wmax: Some(4), ..Default::default() };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut solved = 0;
    for seed in 0..50 {
        let inst = random_small_instance(RandomSpec::default(), 3000 + seed);
        let count = rng.gen_range(1..=3);
        let scenarios = perturbed_scenarios(&inst.bounds, count, &mut rng);
        let set = UncertaintySet::Discrete(DiscreteUncertaintySet { scenarios: scenarios.clone() });
        let paths = enumerate_st_paths(&inst.graph, BRUTE_FORCE_PATH_CAP).map_err(|e| e.to_string())?;
        let oracle = brute_force_all(&inst.graph, &paths, &scenarios, 1.0, 1.0, 6, 4).objective();
        let strict = match solve_strict(&inst.graph, &set, 1.0, 1.0, &config) {
            Ok(sol) => {
                for (i, s) in scenarios.iter().enumerate() {
                    ensure(evaluate(&inst.graph, &sol.decomposition, s, 1.0, 1.0).feasible, || {
                        format!("seed {seed}: infeasible for scenario {i}")
                    })?;
                }
                Some(sol.objective)
            }
            Err(Error::Infeasible | Error::StrictInfeasible { .. }) => None,
            Err(e) => return Err(e.to_string()),
        };
        ensure(strict == oracle, || format!("seed {seed}: strict {strict:?}, enumerated {oracle:?}"))?;
        solved += strict.is_some() as usize;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("50 sets ({solved} feasible) match the enumerated oracle"))
}

/// Scenario sets from the generator on small random graphs; graphs with too
/// few paths are skipped.
fn generated_sets(count: usize, max_edges: usize, p_range: (usize, usize), sizes: (usize, usize), seed: u64) -> Vec<(Graph, GeneratedSet)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let mut s = seed * 10_000;
    while out.len() < count {
        s += 1;
        let inst = random_small_instance(RandomSpec { max_edges, ..RandomSpec::default() }, s);
        if inst.graph.edge_count() > max_edges {
            continue;
        }
        let p = rng.gen_range(p_range.0..=p_range.1);
        let n = rng.gen_range(sizes.0..=sizes.1);
        let gamma_prime = [0.1, 0.2, 0.3][rng.gen_range(0..3)];
        let cfg = GenConfig { p, gamma_prime, count: n, seed: s, ..Default::default() };
        if let Ok(set) = generate(&inst.graph, &cfg) {
            out.push((inst.graph, set));
        }
    }
    out
}

fn ccg_is_sound(graph: &Graph, set: &DiscreteUncertaintySet, f: Formulation, config: &SolverConfig) -> Result<f64, String> {
    let out = ccg_solve(f, graph, set, config).map_err(|e| e.to_string())?;
    let log = &out.state.log;
    ensure(log.windows(2).all(|w| w[0].lb <= w[1].lb), || format!("{f:?}: LB decreased"))?;
    ensure(log.windows(2).all(|w| w[0].ub >= w[1].ub), || format!("{f:?}: UB increased"))?;
    ensure(out.state.gap() <= config.epsilon, || format!("{f:?}: gap {}", out.state.gap()))?;
    ensure(out.result.status == SolveStatus::Optimal, || format!("{f:?}: status {}", out.result.status))?;
    out.result.verify(graph, set).map_err(|e| format!("{f:?}: {e}"))?;
    Ok(out.result.objective)
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let config = SolverConfig::default();
    let mut runs = 0;
    let (g, _) = example_one();
    for seed in 0..4 {
        let set = generate(&g, &GenConfig { p: 3, gamma_prime: 0.3, count: 4, seed, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let set = DiscreteUncertaintySet { scenarios: set.scenarios };
        for f in [Formulation::Ma, Formulation::La] {
            ccg_is_sound(&g, &set, f, &config)?;
            runs += 1;
        }
    }
    for (graph, gen) in generated_sets(8, 10, (2, 4), (2, 5), 5) {
        let set = DiscreteUncertaintySet { scenarios: gen.scenarios };
        for f in [Formulation::Ma, Formulation::La] {
            ccg_is_sound(&graph, &set, f, &config)?;
            runs += 1;
        }
    }
    // One scenario: both formulations equal the deterministic optimum.
    let mut singles = 0;
    let (g, f) = example_one();
    let mut cases = vec![(g, InexactBounds::exact(&f))];
    for (graph, gen) in generated_sets(6, 10, (2, 4), (1, 1), 55) {
        cases.push((graph, gen.scenarios[0].clone()));
    }
    for (graph, scenario) in cases {
        let det = solve_scenario(&graph, scenario.clone(), 1.0, 1.0, &config).map_err(|e| e.to_string())?;
        let set = DiscreteUncertaintySet { scenarios: vec![scenario] };
        for f in [Formulation::Ma, Formulation::La] {
            let obj = ccg_is_sound(&graph, &set, f, &config)?;
            ensure(obj == det.objective, || format!("{f:?} single scenario {obj} vs deterministic {}", det.objective))?;
        }
        singles += 1;
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("{runs} runs sound, {singles} single-scenario sets match"))
}

fn criterion_6() -> Check {
    let start = Instant::now();
    let config = SolverConfig::default();
    let mut certified = 0;
    for (graph, gen) in generated_sets(24, 10, (2, 4), (2, 5), 6) {
        let set = DiscreteUncertaintySet { scenarios: gen.scenarios };
        let ma = ccg_solve(Formulation::Ma, &graph, &set, &config).map_err(|e| e.to_string())?.result;
        let la = ccg_solve(Formulation::La, &graph, &set, &config).map_err(|e| e.to_string())?.result;
        let naive = naive_solve(&graph, &set, &config).map_err(|e| e.to_string())?;
        if [&ma, &la, &naive].iter().any(|r| r.status != SolveStatus::Optimal) {
            continue;
        }
        ensure(ma.objective <= la.objective && la.objective <= naive.objective, || {
            format!("MA {} LA {} naive {}", ma.objective, la.objective, naive.objective)
        })?;
        certified += 1;
    }
    ensure(certified >= 20, || format!("only {certified} sets certified"))?;
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!("{certified} sets ordered"))
}

/// `min_Y (Y + max_ξ min weight with ≤ Y paths)` by exhaustive search.
fn two_stage_oracle(graph: &Graph, paths: &[Path], scenarios: &[Scenario]) -> Option<u64> {
    let mut best: Option<u64> = None;
    for y in 0..=graph.edge_count() as u64 {
        if best.is_some_and(|b| y >= b) {
            break;
        }
        let worst = scenarios
            .iter()
            .map(|s| min_weight_with_paths(graph, paths, s, y as usize, default_wmax(s)))
            .try_fold(0u64, |acc, w| w.map(|w| acc.max(w)));
        if let Some(w) = worst {
            best = Some(best.map_or(y + w, |b| b.min(y + w)));
        }
    }
    best
}

fn criterion_7() -> Check {
    let start = Instant::now();
    let config = SolverConfig::default();
    let mut compared = 0;
    for (graph, gen) in generated_sets(20, 8, (2, 3), (2, 2), 7) {
        let paths = enumerate_st_paths(&graph, BRUTE_FORCE_PATH_CAP).map_err(|e| e.to_string())?;
        let oracle = two_stage_oracle(&graph, &paths, &gen.scenarios);
        let set = DiscreteUncertaintySet { scenarios: gen.scenarios };
        let ma = ccg_solve(Formulation::Ma, &graph, &set, &config).map_err(|e| e.to_string())?.result;
        ensure(Some(ma.objective as u64) == oracle, || format!("MA {} vs oracle {oracle:?}", ma.objective))?;
        compared += 1;
    }
    within(start.elapsed(), Duration::from_secs(600))?;
    Ok(format!("{compared} two-scenario instances match"))
}

fn criterion_8() -> Check {
    let mut checked = 0;
    let mut graphs: Vec<(String, Graph)> = ["small", "layered", "series_parallel", "random"]
        .iter()
        .map(|n| (n.to_string(), bundled(n).expect("bundled").graph))
        .collect();
    graphs.push(("example".into(), example_one().0));
    for (name, graph) in &graphs {
        for (seed, p, gamma_prime) in [(1, 3, 0.1), (2, 4, 0.2), (3, 5, 0.3)] {
            let cfg = GenConfig { p, gamma_prime, count: 6, seed, ..Default::default() };
            let set = generate(graph, &cfg).map_err(|e| format!("{name}: {e}"))?;
            for (s, gen) in set.scenarios.iter().zip(&set.generators) {
                ensure(deviation(s, &set.nominal) as f64 <= set.gamma, || format!("{name}: budget exceeded"))?;
                ensure(gen.len() <= p, || format!("{name}: {} generating paths", gen.len()))?;
                let unit = WeightedDecomposition::new(gen.clone(), vec![1; gen.len()]);
                ensure(evaluate(graph, &unit, s, 1.0, 1.0).feasible, || format!("{name}: unit decomposition infeasible"))?;
                checked += 1;
            }
            let again = generate(graph, &cfg).map_err(|e| e.to_string())?;
            ensure(write_scenarios(graph, &set.to_file()) == write_scenarios(graph, &again.to_file()), || {
                format!("{name}: regeneration differs")
            })?;
        }
    }
    Ok(format!("{checked} scenarios within budget and unit-decomposable; regeneration identical"))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let (graph, lower) = gen_hard_instance(2, 10, &[3, 3, 4, 3, 3, 4]).map_err(|e| e.to_string())?;
    let bounds = InexactBounds::lower_only(&lower);
    let sol = solve_scenario(&graph, bounds.clone(), 1.0, 1.0, &SolverConfig::default()).map_err(|e| e.to_string())?;
    ensure(sol.status == SolveStatus::Optimal, || format!("status {}", sol.status))?;
    ensure(evaluate(&graph, &sol.decomposition, &bounds, 1.0, 1.0).feasible, || "infeasible decomposition".into())?;
    let oracle = brute_force(&graph, &bounds, 1.0, 1.0, 7, 10).map_err(|e| e.to_string())?.objective();
    ensure(oracle == Some(26.0), || format!("brute force gives {oracle:?}"))?;
    ensure(sol.objective == 26.0, || format!("objective {}", sol.objective))?;
    within(start.elapsed(), Duration::from_secs(60))?;
    Ok(format!("objective 26 ({} paths, weight {})", sol.decomposition.len(), sol.decomposition.total_weight()))
}

fn criterion_10() -> Check {
    let config = SolverConfig::default();
    let mut families = 0;
    let graph = example_one().0;
    for seed in 0..3 {
        let p = 3;
        let full = generate(&graph, &GenConfig { p, gamma_prime: 0.2, count: 8, seed, ..Default::default() })
            .map_err(|e| e.to_string())?;
        let mut last_naive = 0;
        for n in [2, 4, 8] {
            let set = DiscreteUncertaintySet { scenarios: full.prefix(n).scenarios };
            let naive = naive_solve(&graph, &set, &config).map_err(|e| e.to_string())?;
            let ma = ccg_solve(Formulation::Ma, &graph, &set, &config).map_err(|e| e.to_string())?.result;
            ensure(naive.path_count >= last_naive, || format!("seed {seed}: naive Y fell to {} at |U| = {n}", naive.path_count))?;
            ensure(ma.path_count <= p, || format!("seed {seed}: MA Y = {} > p at |U| = {n}", ma.path_count))?;
            last_naive = naive.path_count;
        }
        families += 1;
    }
    Ok(format!("{families} nested families, no violations"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("small instance optimum", criterion_1),
        ("MILP equals brute force", criterion_2),
        ("polynomial cases", criterion_3),
        ("strict robust reduction", criterion_4),
        ("CCG soundness", criterion_5),
        ("MA <= LA <= naive", criterion_6),
        ("two-stage oracle", criterion_7),
        ("scenario generator", criterion_8),
        ("3-PARTITION optimum", criterion_9),
        ("nested trend", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

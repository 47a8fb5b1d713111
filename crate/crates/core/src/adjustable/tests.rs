use super::*;
use crate::graph::{EdgeBounds, InexactBounds, Scenario, UpperBound};
use crate::instances::{example_one, example_one_decomposition};
use crate::milp::{solve_decomposition, ModelVariant, ModelVars, Sense};

fn exact_set() -> (Graph, DiscreteUncertaintySet) {
    let (g, f) = example_one();
    (g, DiscreteUncertaintySet { scenarios: vec![InexactBounds::exact(&f)] })
}

fn single_edge() -> Graph {
    Graph::new(&["s", "t"], &[(0, "s", "t")], "s", "t").unwrap()
}

fn sc(l: u64, u: u64) -> Scenario {
    InexactBounds(vec![EdgeBounds::new(l, UpperBound::Finite(u))])
}

#[test]
fn single_scenario_matches_deterministic_optimum() {
    let (g, set) = exact_set();
    let (det, _) =
        solve_decomposition(&g, &set.scenarios[0], 1.0, 1.0, &SolverConfig::default(), ModelVariant::Exact).unwrap();
    for f in [Formulation::Ma, Formulation::La] {
        let out = ccg_solve(f, &g, &set, &SolverConfig::default()).unwrap();
        assert_eq!(out.state.iteration, 1, "{f:?}");
        assert_eq!(out.result.objective, det.objective, "{f:?}");
        assert_eq!(out.result.status, SolveStatus::Optimal);
        out.result.verify(&g, &set).unwrap();
    }
    let naive = naive_solve(&g, &set, &SolverConfig::default()).unwrap();
    assert_eq!(naive.objective, det.objective);
}

#[test]
fn la_recourse_on_example_paths() {
    let (g, set) = exact_set();
    let paths = example_one_decomposition(&g).paths;
    let first = FirstStage::La { y: vec![true; 5], x: Vec::new(), paths };
    let out = solve_subproblem(&g, &first, &set, &SolverConfig::default()).unwrap();
    assert_eq!(out.value, 10);
    assert_eq!(out.recourse[0].decomposition.sorted_weights(), vec![1, 2, 2, 2, 3]);
}

#[test]
fn ma_without_paths_reports_first_positive_scenario() {
    let g = single_edge();
    let set = DiscreteUncertaintySet { scenarios: vec![sc(0, 3), sc(2, 3), sc(1, 3)] };
    let first = FirstStage::Ma { y: vec![false, false] };
    let err = solve_subproblem(&g, &first, &set, &SolverConfig::default()).unwrap_err();
    assert_eq!(err, Error::InfeasibleAt { index: 1 });
}

#[test]
fn worst_scenario_is_the_heavier_one() {
    let g = single_edge();
    let set = DiscreteUncertaintySet { scenarios: vec![sc(1, 4), sc(3, 4), sc(3, 5)] };
    let first = FirstStage::Ma { y: vec![true] };
    let out = solve_subproblem(&g, &first, &set, &SolverConfig::default()).unwrap();
    assert_eq!((out.worst, out.value), (1, 3));
}

#[test]
fn cuts() {
    assert_eq!(make_cut(&FirstStage::Ma { y: vec![true, true, true, false] }), Cut::MinPaths(4));
    let vars = MasterVars {
        y: vec![0, 1],
        total_weight: 9,
        scenarios: vec![ModelVars { y: vec![0, 1], x: vec![vec![2, 3], vec![4, 5]], w: vec![], z: vec![] }],
    };
    let zero = Cut::NoGood { y: vec![false; 2], x: vec![vec![false; 2]; 2] };
    let (terms, rhs) = zero.row(&vars).unwrap();
    assert!(terms.iter().all(|&(_, c)| c == 1));
    assert_eq!((terms.len(), rhs), (6, 1));
    let mixed = make_cut(&FirstStage::La {
        y: vec![true, false],
        x: vec![vec![true, false], vec![false, false]],
        paths: Vec::new(),
    });
    let (terms, rhs) = mixed.row(&vars).unwrap();
    assert_eq!(terms, vec![(0, -1), (1, 1), (2, -1), (3, 1), (4, 1), (5, 1)]);
    assert_eq!(rhs, -1);
}

#[test]
fn master_shapes() {
    let (g, f) = example_one();
    let m = g.edge_count();
    let b = InexactBounds::exact(&f);
    let cfg = SolverConfig { kbar: Some(6), wmax: Some(7), ..Default::default() };
    let subset = vec![b.clone(), b.clone()];
    let (model, vars) = build_master(Formulation::Ma, &g, &subset, &[], &cfg).unwrap();
    assert_eq!(model.var_count(), 6 + 1 + 2 * 6 * (2 * m + 1));
    assert_eq!(vars.scenarios.len(), 2);
    let (la, _) = build_master(Formulation::La, &g, &subset, &[], &cfg).unwrap();
    assert_eq!(la.var_count(), 6 + 1 + 6 * m + 2 * 6 * (m + 1));
    let cut = Cut::NoGood { y: vec![false; 6], x: vec![vec![false; m]; 6] };
    let (with_cut, _) = build_master(Formulation::La, &g, &subset, &[cut], &cfg).unwrap();
    assert_eq!(with_cut.constraints.len(), la.constraints.len() + 1);
    let extra = with_cut.constraints.last().unwrap();
    assert_eq!((extra.sense, extra.rhs), (Sense::Ge, 1));
}

#[test]
fn presolve_bounds() {
    let (g, set) = exact_set();
    assert_eq!(presolve_lower_bound(Formulation::La, &g, &set).unwrap(), 5);
    let zero = DiscreteUncertaintySet { scenarios: vec![InexactBounds(vec![EdgeBounds::at_least(0); g.edge_count()])] };
    assert_eq!(presolve_lower_bound(Formulation::Ma, &g, &zero).unwrap(), 0);
    // Two parallel edges, each positive in one scenario only.
    let g = Graph::new(&["s", "t"], &[(0, "s", "t"), (1, "s", "t")], "s", "t").unwrap();
    let a = InexactBounds(vec![EdgeBounds::at_least(2), EdgeBounds::at_least(0)]);
    let b = InexactBounds(vec![EdgeBounds::at_least(0), EdgeBounds::at_least(1)]);
    let set = DiscreteUncertaintySet { scenarios: vec![a, b] };
    assert_eq!(presolve_lower_bound(Formulation::La, &g, &set).unwrap(), 2);
    assert_eq!(presolve_lower_bound(Formulation::Ma, &g, &set).unwrap(), 1);
}

#[test]
fn parallel_edges_separate_formulations() {
    // MA can move its single path between the edges; LA needs both.
    let g = Graph::new(&["s", "t"], &[(0, "s", "t"), (1, "s", "t")], "s", "t").unwrap();
    let a = InexactBounds(vec![EdgeBounds::new(2, UpperBound::Finite(2)), EdgeBounds::new(0, UpperBound::Finite(0))]);
    let b = InexactBounds(vec![EdgeBounds::new(0, UpperBound::Finite(0)), EdgeBounds::new(2, UpperBound::Finite(2))]);
    let set = DiscreteUncertaintySet { scenarios: vec![a, b] };
    let cfg = SolverConfig::default();
    let ma = ccg_solve(Formulation::Ma, &g, &set, &cfg).unwrap();
    let la = ccg_solve(Formulation::La, &g, &set, &cfg).unwrap();
    let naive = naive_solve(&g, &set, &cfg).unwrap();
    assert_eq!((ma.result.path_count, ma.result.weight), (1, 2));
    assert_eq!((la.result.path_count, la.result.weight), (2, 2));
    assert_eq!(naive.objective, 4.0);
    for r in [&ma.result, &la.result, &naive] {
        r.verify(&g, &set).unwrap();
    }
    for log in [&ma.state.log, &la.state.log] {
        assert!(log.windows(2).all(|p| p[0].lb <= p[1].lb && p[0].ub >= p[1].ub));
    }
}

#[test]
fn identical_scenarios_pool_once() {
    let (g, set) = exact_set();
    let twice = DiscreteUncertaintySet { scenarios: vec![set.scenarios[0].clone(), set.scenarios[0].clone()] };
    let one = naive_solve(&g, &set, &SolverConfig::default()).unwrap();
    let two = naive_solve(&g, &twice, &SolverConfig::default()).unwrap();
    assert_eq!(one.path_count, two.path_count);
    assert_eq!(one.shared_paths, two.shared_paths);
}

#[test]
fn infeasible_scenario_is_reported() {
    let g = Graph::new(&["s", "a", "t"], &[(0, "s", "a"), (1, "a", "t")], "s", "t").unwrap();
    let ok = InexactBounds(vec![EdgeBounds::new(1, UpperBound::Finite(2)); 2]);
    let bad = InexactBounds(vec![EdgeBounds::new(1, UpperBound::Finite(2)), EdgeBounds::new(3, UpperBound::Finite(4))]);
    let set = DiscreteUncertaintySet { scenarios: vec![ok, bad] };
    assert_eq!(naive_solve(&g, &set, &SolverConfig::default()).unwrap_err(), Error::InfeasibleAt { index: 1 });
    assert!(ccg_solve(Formulation::Ma, &g, &set, &SolverConfig::default()).is_err());
}

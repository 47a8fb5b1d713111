use proptest::prelude::*;

use flowdec::graph::{evaluate, flow_to_paths, FlowAssignment};
use flowdec::instances::{random_small_instance, RandomSpec};
use flowdec::io::{parse_instance, parse_scenarios, write_instance, write_scenarios};
use flowdec::milp::{brute_force, solve_decomposition, ModelVariant, SolverConfig};
use flowdec::poly::{solve_weight_min, Variant};
use flowdec::scenario_gen::{deviation, generate, GenConfig};
use flowdec::{Error, WeightedDecomposition};

fn exact_spec() -> RandomSpec {
    RandomSpec { exact: true, max_bound: 100, ..RandomSpec::default() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn peeling_reproduces_the_flow(seed in 0u64..10_000) {
        let inst = random_small_instance(exact_spec(), seed);
        let flow = FlowAssignment(inst.bounds.lowers());
        let d = flow_to_paths(&inst.graph, &flow).unwrap();
        prop_assert_eq!(d.coverage(&inst.graph), flow.0.clone());
        prop_assert!(d.len() <= inst.graph.edge_count());
        prop_assert_eq!(d.is_empty(), flow.is_zero());
    }

    #[test]
    fn minimum_path_count_never_exceeds_peeling(seed in 0u64..10_000) {
        let inst = random_small_instance(exact_spec(), seed);
        let peeled = flow_to_paths(&inst.graph, &FlowAssignment(inst.bounds.lowers())).unwrap();
        let (_, d) = solve_decomposition(&inst.graph, &inst.bounds, 1.0, 0.0, &SolverConfig::default(), ModelVariant::Exact).unwrap();
        prop_assert!(d.len() <= peeled.len());
        prop_assert!(evaluate(&inst.graph, &d, &inst.bounds, 1.0, 0.0).feasible);
    }

    #[test]
    fn weight_minimum_matches_unit_brute_force(seed in 0u64..10_000) {
        let inst = random_small_instance(RandomSpec::default(), seed);
        let variant = if inst.bounds.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
        let poly = match solve_weight_min(&inst.graph, &inst.bounds, variant) {
            Ok(d) => Some(d.total_weight() as f64),
            Err(Error::Infeasible) => None,
            Err(e) => return Err(TestCaseError::fail(e.to_string())),
        };
        let k = inst.bounds.lower_sum().max(1) as usize;
        let oracle = brute_force(&inst.graph, &inst.bounds, 0.0, 1.0, k, 1).unwrap().objective();
        prop_assert_eq!(poly, oracle);
    }

    #[test]
    fn instance_text_round_trips(seed in 0u64..10_000) {
        let inst = random_small_instance(RandomSpec::default(), seed);
        let text = write_instance(&inst);
        let back = parse_instance(&text).unwrap();
        prop_assert_eq!(&back, &inst);
        prop_assert_eq!(write_instance(&back), text);
    }

    #[test]
    fn generated_scenarios_respect_budget(seed in 0u64..10_000, p in 1usize..5, g in 0usize..3) {
        let inst = random_small_instance(exact_spec(), seed);
        let cfg = GenConfig { p, gamma_prime: [0.1, 0.2, 0.3][g], count: 4, seed, ..Default::default() };
        let set = match generate(&inst.graph, &cfg) {
            Ok(set) => set,
            Err(_) => return Ok(()),
        };
        prop_assert_eq!(set.scenarios.len(), 4);
        for (s, paths) in set.scenarios.iter().zip(&set.generators) {
            prop_assert!(deviation(s, &set.nominal) as f64 <= set.gamma);
            prop_assert!(paths.len() <= p);
            let unit = WeightedDecomposition::new(paths.clone(), vec![1; paths.len()]);
            prop_assert!(evaluate(&inst.graph, &unit, s, 1.0, 1.0).feasible);
        }
        let text = write_scenarios(&inst.graph, &set.to_file());
        let parsed = parse_scenarios(&inst.graph, &text).unwrap();
        prop_assert_eq!(parsed.scenarios, set.scenarios.clone());
        prop_assert_eq!(text, write_scenarios(&inst.graph, &generate(&inst.graph, &cfg).unwrap().to_file()));
    }
}


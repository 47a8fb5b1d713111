//! Uncertainty sets and strictly robust decompositions.
//!
//! Coverage constraints act edge by edge, so a decomposition is feasible for
//! every scenario of a set exactly when it is feasible for the componentwise
//! worst case: the largest lower bound and the smallest upper bound.

use crate::error::{Error, Result};
use crate::graph::{EdgeBounds, EdgeId, Graph, InexactBounds, Scenario, UpperBound, WeightedDecomposition};
use crate::milp::{solve_decomposition, variant_for, SolveStatus, SolverConfig};
use crate::poly::{solve_path_min_no_ub, solve_weight_min, Variant};

#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteUncertaintySet {
    pub scenarios: Vec<Scenario>,
}

/// Per-edge ranges `lower ∈ [lower.0, lower.1]`, `upper ∈ [upper.0, upper.1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalUncertaintySpec {
    pub lower: Vec<(u64, u64)>,
    pub upper: Vec<(UpperBound, UpperBound)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetUncertaintySpec {
    pub intervals: IntervalUncertaintySpec,
    pub nominal: Scenario,
    pub gamma: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum UncertaintySet {
    Discrete(DiscreteUncertaintySet),
    Interval(IntervalUncertaintySpec),
    Budget(BudgetUncertaintySpec),
}

fn upper_le(a: UpperBound, b: UpperBound) -> bool {
    match (a, b) {
        (_, UpperBound::Unbounded) => true,
        (UpperBound::Unbounded, UpperBound::Finite(_)) => false,
        (UpperBound::Finite(x), UpperBound::Finite(y)) => x <= y,
    }
}

/// Rejects scenarios whose interval is empty on some edge.
fn checked(graph: &Graph, bounds: Vec<EdgeBounds>) -> Result<Scenario> {
    let bad: Vec<EdgeId> = bounds
        .iter()
        .enumerate()
        .filter(|(_, b)| !b.is_consistent())
        .map(|(e, _)| graph.edge(e).id)
        .collect();
    if bad.is_empty() {
        Ok(InexactBounds(bounds))
    } else {
        Err(Error::StrictInfeasible { edges: bad })
    }
}

fn check_len(graph: &Graph, len: usize) -> Result<()> {
    if len == graph.edge_count() {
        Ok(())
    } else {
        Err(Error::InvalidInstance(format!("uncertainty data covers {len} edges, graph has {}", graph.edge_count())))
    }
}

impl IntervalUncertaintySpec {
    /// Smallest intervals containing every scenario of `set`.
    pub fn hull(set: &DiscreteUncertaintySet) -> Self {
        let m = set.scenarios.first().map_or(0, InexactBounds::len);
        let mut lower = vec![(u64::MAX, 0); m];
        let mut upper = vec![(UpperBound::Unbounded, UpperBound::Finite(0)); m];
        for s in &set.scenarios {
            for (e, b) in s.0.iter().enumerate() {
                lower[e] = (lower[e].0.min(b.lower), lower[e].1.max(b.lower));
                upper[e] = (upper[e].0.min(b.upper), upper[e].1.max(b.upper));
            }
        }
        Self { lower, upper }
    }

    pub fn validate(&self, graph: &Graph) -> Result<()> {
        check_len(graph, self.lower.len())?;
        check_len(graph, self.upper.len())?;
        let empty = self.lower.iter().any(|&(a, b)| a > b) || self.upper.iter().any(|&(a, b)| !upper_le(a, b));
        if empty {
            return Err(Error::InvalidInstance("empty uncertainty interval".into()));
        }
        Ok(())
    }
}

impl BudgetUncertaintySpec {
    pub fn validate(&self, graph: &Graph) -> Result<()> {
        self.intervals.validate(graph)?;
        check_len(graph, self.nominal.len())?;
        let inside = self.nominal.0.iter().enumerate().all(|(e, b)| {
            let (l0, l1) = self.intervals.lower[e];
            let (u0, u1) = self.intervals.upper[e];
            l0 <= b.lower && b.lower <= l1 && upper_le(u0, b.upper) && upper_le(b.upper, u1)
        });
        if !inside {
            return Err(Error::InvalidInstance("nominal scenario lies outside its intervals".into()));
        }
        Ok(())
    }
}

/// Componentwise max of lowers and min of uppers.
pub fn reduce_discrete(graph: &Graph, set: &DiscreteUncertaintySet) -> Result<Scenario> {
    let first = set.scenarios.first().ok_or_else(|| Error::InvalidInstance("empty uncertainty set".into()))?;
    for s in &set.scenarios {
        check_len(graph, s.len())?;
    }
    let mut out = first.0.clone();
    for s in &set.scenarios[1..] {
        for (acc, b) in out.iter_mut().zip(&s.0) {
            acc.lower = acc.lower.max(b.lower);
            acc.upper = acc.upper.min(b.upper);
        }
    }
    checked(graph, out)
}

pub fn reduce_interval(graph: &Graph, spec: &IntervalUncertaintySpec) -> Result<Scenario> {
    spec.validate(graph)?;
    let bounds = spec.lower.iter().zip(&spec.upper).map(|(&(_, l1), &(u0, _))| EdgeBounds::new(l1, u0)).collect();
    checked(graph, bounds)
}

/// Per edge: `min(l̂ + Γ, l̄)` and `max(û - Γ, ū_min)`.
pub fn reduce_budget(graph: &Graph, spec: &BudgetUncertaintySpec) -> Result<Scenario> {
    spec.validate(graph)?;
    let g = spec.gamma;
    let bounds = spec
        .nominal
        .0
        .iter()
        .enumerate()
        .map(|(e, nom)| {
            let (_, l1) = spec.intervals.lower[e];
            let (u0, _) = spec.intervals.upper[e];
            let lower = (nom.lower.saturating_add(g)).min(l1);
            let upper = match nom.upper {
                UpperBound::Finite(u) => UpperBound::Finite(u.saturating_sub(g)).max(u0),
                UpperBound::Unbounded => UpperBound::Unbounded,
            };
            EdgeBounds::new(lower, upper)
        })
        .collect();
    checked(graph, bounds)
}

pub fn reduce(graph: &Graph, set: &UncertaintySet) -> Result<Scenario> {
    match set {
        UncertaintySet::Discrete(d) => reduce_discrete(graph, d),
        UncertaintySet::Interval(i) => reduce_interval(graph, i),
        UncertaintySet::Budget(b) => reduce_budget(graph, b),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrictMethod {
    WeightMin,
    PathCover,
    Milp,
}

impl StrictMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            StrictMethod::WeightMin => "weight_min",
            StrictMethod::PathCover => "path_cover",
            StrictMethod::Milp => "milp",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrictSolution {
    pub scenario: Scenario,
    pub decomposition: WeightedDecomposition,
    pub objective: f64,
    pub status: SolveStatus,
    pub method: StrictMethod,
}

/// Solves the deterministic problem on the worst-case scenario, choosing the
/// polynomial solver when the objective allows it.
pub fn solve_strict(
    graph: &Graph,
    uncertainty: &UncertaintySet,
    a_y: f64,
    a_w: f64,
    config: &SolverConfig,
) -> Result<StrictSolution> {
    let scenario = reduce(graph, uncertainty)?;
    solve_scenario(graph, scenario, a_y, a_w, config)
}

pub fn solve_scenario(graph: &Graph, scenario: Scenario, a_y: f64, a_w: f64, config: &SolverConfig) -> Result<StrictSolution> {
    let objective_of = |d: &WeightedDecomposition| a_y * d.len() as f64 + a_w * d.total_weight() as f64;
    if a_y == 0.0 {
        let variant = if scenario.has_upper_bounds() { Variant::WithUpper } else { Variant::NoUpper };
        let decomposition = solve_weight_min(graph, &scenario, variant)?;
        let objective = objective_of(&decomposition);
        return Ok(StrictSolution { scenario, decomposition, objective, status: SolveStatus::Optimal, method: StrictMethod::WeightMin });
    }
    if a_w == 0.0 && !scenario.has_upper_bounds() {
        let decomposition = solve_path_min_no_ub(graph, &scenario.lowers())?;
        let objective = objective_of(&decomposition);
        return Ok(StrictSolution { scenario, decomposition, objective, status: SolveStatus::Optimal, method: StrictMethod::PathCover });
    }
    let (result, decomposition) = solve_decomposition(graph, &scenario, a_y, a_w, config, variant_for(&scenario))?;
    Ok(StrictSolution { scenario, decomposition, objective: result.objective, status: result.status, method: StrictMethod::Milp })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::evaluate;
    use crate::instances::example_one;
    use UpperBound::{Finite, Unbounded};

    fn one_edge() -> Graph {
        Graph::new(&["s", "t"], &[(0, "s", "t")], "s", "t").unwrap()
    }

    fn sc(l: u64, u: UpperBound) -> Scenario {
        InexactBounds(vec![EdgeBounds::new(l, u)])
    }

    fn interval(l: (u64, u64), u: (u64, u64)) -> IntervalUncertaintySpec {
        IntervalUncertaintySpec { lower: vec![l], upper: vec![(Finite(u.0), Finite(u.1))] }
    }

    #[test]
    fn discrete_reduction() {
        let g = one_edge();
        let set = DiscreteUncertaintySet { scenarios: vec![sc(2, Finite(9)), sc(5, Finite(7))] };
        assert_eq!(reduce_discrete(&g, &set).unwrap(), sc(5, Finite(7)));
        let single = DiscreteUncertaintySet { scenarios: vec![sc(3, Finite(4))] };
        assert_eq!(reduce_discrete(&g, &single).unwrap(), sc(3, Finite(4)));
        let bad = DiscreteUncertaintySet { scenarios: vec![sc(4, Finite(5)), sc(1, Finite(2))] };
        assert_eq!(reduce_discrete(&g, &bad).unwrap_err(), Error::StrictInfeasible { edges: vec![EdgeId(0)] });
    }

    #[test]
    fn discrete_unbounded_uppers() {
        let g = one_edge();
        let set = DiscreteUncertaintySet { scenarios: vec![sc(1, Unbounded), sc(2, Finite(6))] };
        assert_eq!(reduce_discrete(&g, &set).unwrap(), sc(2, Finite(6)));
        let set = DiscreteUncertaintySet { scenarios: vec![sc(1, Unbounded), sc(2, Unbounded)] };
        assert_eq!(reduce_discrete(&g, &set).unwrap(), sc(2, Unbounded));
    }

    #[test]
    fn interval_reduction() {
        let g = one_edge();
        assert_eq!(reduce_interval(&g, &interval((2, 5), (7, 9))).unwrap(), sc(5, Finite(7)));
        assert_eq!(reduce_interval(&g, &interval((4, 4), (6, 6))).unwrap(), sc(4, Finite(6)));
        assert!(matches!(reduce_interval(&g, &interval((2, 8), (7, 9))), Err(Error::StrictInfeasible { .. })));
    }

    #[test]
    fn budget_reduction() {
        let g = one_edge();
        let spec = |nl: u64, l: (u64, u64), gamma: u64| BudgetUncertaintySpec {
            intervals: interval(l, (9, 12)),
            nominal: sc(nl, Finite(10)),
            gamma,
        };
        assert_eq!(reduce_budget(&g, &spec(3, (1, 6), 2)).unwrap().0[0].lower, 5);
        assert_eq!(reduce_budget(&g, &spec(3, (1, 6), 0)).unwrap(), sc(3, Finite(10)));
        assert_eq!(reduce_budget(&g, &spec(3, (1, 4), 9)).unwrap(), sc(4, Finite(9)));
    }

    #[test]
    fn strict_interval_collapsing_to_example_one() {
        let (g, f) = example_one();
        let spec = IntervalUncertaintySpec {
            lower: f.0.iter().map(|&v| (v.saturating_sub(1), v)).collect(),
            upper: f.0.iter().map(|&v| (Finite(v), Finite(v + 2))).collect(),
        };
        let sol = solve_strict(&g, &UncertaintySet::Interval(spec), 1.0, 0.0, &SolverConfig::default()).unwrap();
        assert_eq!(sol.objective, 5.0);
        assert_eq!(sol.method, StrictMethod::Milp);
        assert!(evaluate(&g, &sol.decomposition, &InexactBounds::exact(&f), 1.0, 0.0).feasible);
    }

    #[test]
    fn dispatch_to_polynomial_solvers() {
        let (g, f) = example_one();
        let cfg = SolverConfig::default();
        let exact = UncertaintySet::Discrete(DiscreteUncertaintySet { scenarios: vec![InexactBounds::exact(&f)] });
        let sol = solve_strict(&g, &exact, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(sol.method, StrictMethod::WeightMin);
        assert_eq!(sol.objective, 10.0);
        let lower = UncertaintySet::Discrete(DiscreteUncertaintySet { scenarios: vec![InexactBounds::lower_only(&f.0)] });
        let sol = solve_strict(&g, &lower, 1.0, 0.0, &cfg).unwrap();
        assert_eq!(sol.method, StrictMethod::PathCover);
        assert_eq!(sol.objective, 5.0);
    }

    #[test]
    fn hull_contains_scenarios() {
        let set = DiscreteUncertaintySet { scenarios: vec![sc(2, Finite(9)), sc(5, Unbounded)] };
        let h = IntervalUncertaintySpec::hull(&set);
        assert_eq!(h.lower, vec![(2, 5)]);
        assert_eq!(h.upper, vec![(Finite(9), Unbounded)]);
        assert_eq!(reduce_interval(&one_edge(), &h).unwrap(), sc(5, Finite(9)));
    }
}

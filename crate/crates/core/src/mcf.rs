//! Integer min-cost flow with edge lower bounds and node demands.
//!
//! Demand convention: `demand[v] = outflow(v) - inflow(v)`, so positive values
//! are supplies and negative values are demands.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{Error, Result};
use crate::graph::UpperBound;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McfEdge {
    pub tail: usize,
    pub head: usize,
    pub cost: i64,
    pub lower: u64,
    pub upper: UpperBound,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct McfNetwork {
    pub demand: Vec<i64>,
    pub edges: Vec<McfEdge>,
}

impl McfNetwork {
    pub fn new(nodes: usize) -> Self {
        Self { demand: vec![0; nodes], edges: Vec::new() }
    }

    pub fn node_count(&self) -> usize {
        self.demand.len()
    }

    pub fn add_node(&mut self, demand: i64) -> usize {
        self.demand.push(demand);
        self.demand.len() - 1
    }

    pub fn add_edge(&mut self, tail: usize, head: usize, cost: i64, lower: u64, upper: UpperBound) -> usize {
        self.edges.push(McfEdge { tail, head, cost, lower, upper });
        self.edges.len() - 1
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.node_count();
        if self.demand.iter().sum::<i64>() != 0 {
            return Err(Error::InvalidNetwork("demands do not sum to zero".into()));
        }
        for (i, e) in self.edges.iter().enumerate() {
            if e.tail >= n || e.head >= n {
                return Err(Error::InvalidNetwork(format!("edge {i} endpoint out of range")));
            }
            if !e.upper.admits(e.lower) {
                return Err(Error::InvalidNetwork(format!("edge {i} has lower > upper")));
            }
            if e.cost < 0 {
                return Err(Error::InvalidNetwork(format!("edge {i} has negative cost")));
            }
        }
        Ok(())
    }

    /// Finite capacity that no cycle-free feasible flow can exceed on any edge.
    pub fn flow_cap(&self) -> u64 {
        let d: u64 = self.demand.iter().map(|d| d.unsigned_abs()).sum();
        let l: u64 = self.edges.iter().map(|e| e.lower).sum();
        d + l
    }

    pub fn cost_of(&self, flow: &[u64]) -> i64 {
        self.edges.iter().zip(flow).map(|(e, &f)| e.cost * f as i64).sum()
    }

    /// Whether `flow` respects every bound and balances every demand.
    pub fn is_feasible(&self, flow: &[u64]) -> bool {
        if flow.len() != self.edges.len() {
            return false;
        }
        let mut balance = vec![0i64; self.node_count()];
        for (e, &f) in self.edges.iter().zip(flow) {
            if f < e.lower || !e.upper.admits(f) {
                return false;
            }
            balance[e.tail] += f as i64;
            balance[e.head] -= f as i64;
        }
        balance == self.demand
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum McfStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct McfSolution {
    pub flow: Vec<u64>,
    pub cost: i64,
    pub status: McfStatus,
}

impl McfSolution {
    fn infeasible(m: usize) -> Self {
        Self { flow: vec![0; m], cost: 0, status: McfStatus::Infeasible }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == McfStatus::Optimal
    }
}

/// Shifts every lower bound into the demands. Returns the shifted network and
/// the constant cost `Σ c·l` carried by the removed lower-bound flow.
pub fn eliminate_lower_bounds(net: &McfNetwork) -> (McfNetwork, i64) {
    let mut demand = net.demand.clone();
    let mut offset = 0i64;
    let edges = net
        .edges
        .iter()
        .map(|e| {
            let l = e.lower as i64;
            demand[e.tail] -= l;
            demand[e.head] += l;
            offset += e.cost * l;
            let upper = match e.upper {
                UpperBound::Finite(u) => UpperBound::Finite(u - e.lower),
                UpperBound::Unbounded => UpperBound::Unbounded,
            };
            McfEdge { lower: 0, upper, ..e.clone() }
        })
        .collect();
    (McfNetwork { demand, edges }, offset)
}

#[derive(Debug, Clone)]
struct Arc {
    to: usize,
    cap: u64,
    cost: i64,
    rev: usize,
}

struct Residual {
    adj: Vec<Vec<Arc>>,
}

impl Residual {
    fn new(n: usize) -> Self {
        Self { adj: vec![Vec::new(); n] }
    }

    /// Adds an arc and its reverse; returns the location of the forward arc.
    fn add(&mut self, u: usize, v: usize, cap: u64, cost: i64) -> (usize, usize) {
        let fwd = self.adj[u].len();
        let back = self.adj[v].len() + usize::from(u == v);
        self.adj[u].push(Arc { to: v, cap, cost, rev: back });
        self.adj[v].push(Arc { to: u, cap: 0, cost: -cost, rev: fwd });
        (u, fwd)
    }

    fn push(&mut self, u: usize, i: usize, amount: u64) {
        let Arc { to, rev, .. } = self.adj[u][i];
        self.adj[u][i].cap -= amount;
        self.adj[to][rev].cap += amount;
    }

    /// Edmonds-Karp max flow from `s` to `t`, bounded by `limit`.
    fn max_flow(&mut self, s: usize, t: usize, limit: u64) -> u64 {
        let n = self.adj.len();
        let mut total = 0;
        while total < limit {
            let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
            let mut queue = VecDeque::from([s]);
            let mut seen = vec![false; n];
            seen[s] = true;
            while let Some(u) = queue.pop_front() {
                if u == t {
                    break;
                }
                for (i, a) in self.adj[u].iter().enumerate() {
                    if a.cap > 0 && !seen[a.to] {
                        seen[a.to] = true;
                        pred[a.to] = Some((u, i));
                        queue.push_back(a.to);
                    }
                }
            }
            if !seen[t] {
                break;
            }
            let mut amount = limit - total;
            let mut v = t;
            while let Some((u, i)) = pred[v] {
                amount = amount.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = pred[v] {
                self.push(u, i, amount);
                v = u;
            }
            total += amount;
        }
        total
    }

    /// Successive shortest paths with Dijkstra on reduced costs. All arc costs
    /// must be non-negative initially so zero potentials are valid.
    fn min_cost_flow(&mut self, s: usize, t: usize, required: u64) -> Option<i64> {
        let n = self.adj.len();
        let mut potential = vec![0i64; n];
        let mut sent = 0;
        let mut cost = 0i64;
        while sent < required {
            let mut dist = vec![i64::MAX; n];
            let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
            dist[s] = 0;
            let mut heap = BinaryHeap::from([Reverse((0i64, s))]);
            while let Some(Reverse((d, u))) = heap.pop() {
                if d > dist[u] {
                    continue;
                }
                for (i, a) in self.adj[u].iter().enumerate() {
                    if a.cap == 0 {
                        continue;
                    }
                    let reduced = a.cost + potential[u] - potential[a.to];
                    debug_assert!(reduced >= 0, "negative reduced cost");
                    let nd = d + reduced;
                    if nd < dist[a.to] {
                        dist[a.to] = nd;
                        pred[a.to] = Some((u, i));
                        heap.push(Reverse((nd, a.to)));
                    }
                }
            }
            if dist[t] == i64::MAX {
                return None;
            }
            for v in 0..n {
                if dist[v] != i64::MAX {
                    potential[v] += dist[v];
                }
            }
            let mut amount = required - sent;
            let mut v = t;
            while let Some((u, i)) = pred[v] {
                amount = amount.min(self.adj[u][i].cap);
                v = u;
            }
            let mut v = t;
            while let Some((u, i)) = pred[v] {
                cost += self.adj[u][i].cost * amount as i64;
                self.push(u, i, amount);
                v = u;
            }
            sent += amount;
        }
        Some(cost)
    }
}

fn build_residual(net: &McfNetwork, cap: u64) -> (Residual, Vec<(usize, usize)>, usize, usize, u64) {
    let n = net.node_count();
    let (ss, tt) = (n, n + 1);
    let mut res = Residual::new(n + 2);
    let arcs = net
        .edges
        .iter()
        .map(|e| res.add(e.tail, e.head, e.upper.or_cap(cap), e.cost))
        .collect();
    let mut supply = 0;
    for (v, &d) in net.demand.iter().enumerate() {
        if d > 0 {
            res.add(ss, v, d as u64, 0);
            supply += d as u64;
        } else if d < 0 {
            res.add(v, tt, d.unsigned_abs(), 0);
        }
    }
    (res, arcs, ss, tt, supply)
}

pub fn solve_mcf(net: &McfNetwork) -> Result<McfSolution> {
    net.validate()?;
    let m = net.edges.len();
    let cap = net.flow_cap();
    let (reduced, offset) = eliminate_lower_bounds(net);

    let (mut probe, _, ss, tt, supply) = build_residual(&reduced, cap);
    if probe.max_flow(ss, tt, supply) < supply {
        return Ok(McfSolution::infeasible(m));
    }

    let (mut res, arcs, ss, tt, supply) = build_residual(&reduced, cap);
    let Some(cost) = res.min_cost_flow(ss, tt, supply) else {
        return Ok(McfSolution::infeasible(m));
    };
    let flow: Vec<u64> = arcs
        .iter()
        .zip(&net.edges)
        .map(|(&(u, i), e)| {
            let a = &res.adj[u][i];
            res.adj[a.to][a.rev].cap + e.lower
        })
        .collect();
    let total = cost + offset;
    debug_assert_eq!(total, net.cost_of(&flow));
    debug_assert!(net.is_feasible(&flow));
    Ok(McfSolution { flow, cost: total, status: McfStatus::Optimal })
}

#[cfg(test)]
mod tests {
    use super::*;
    use UpperBound::{Finite, Unbounded};

    #[test]
    fn lower_bound_elimination() {
        let mut net = McfNetwork::new(2);
        net.add_edge(0, 1, 1, 2, Finite(4));
        let (r, offset) = eliminate_lower_bounds(&net);
        assert_eq!(offset, 2);
        assert_eq!(r.edges[0].lower, 0);
        assert_eq!(r.edges[0].upper, Finite(2));
        assert_eq!(r.demand, vec![-2, 2]);
    }

    #[test]
    fn elimination_identity_without_lower_bounds() {
        let mut net = McfNetwork::new(3);
        net.demand = vec![2, 0, -2];
        net.add_edge(0, 1, 3, 0, Finite(5));
        net.add_edge(1, 2, 1, 0, Unbounded);
        let (r, offset) = eliminate_lower_bounds(&net);
        assert_eq!(offset, 0);
        assert_eq!(r, net);
    }

    #[test]
    fn chain_through_unit_cost_edge() {
        // s' -> s -> t -> t'
        let mut net = McfNetwork::new(4);
        net.demand = vec![3, 0, 0, -3];
        net.add_edge(0, 1, 1, 0, Unbounded);
        net.add_edge(1, 2, 0, 0, Unbounded);
        net.add_edge(2, 3, 0, 0, Unbounded);
        let sol = solve_mcf(&net).unwrap();
        assert!(sol.is_optimal());
        assert_eq!(sol.cost, 3);
        assert_eq!(sol.flow, vec![3, 3, 3]);
    }

    #[test]
    fn unreachable_lower_bound_is_infeasible() {
        let mut net = McfNetwork::new(3);
        net.demand = vec![1, 0, -1];
        net.add_edge(0, 1, 0, 0, Finite(1));
        net.add_edge(1, 2, 0, 3, Finite(3));
        let sol = solve_mcf(&net).unwrap();
        assert_eq!(sol.status, McfStatus::Infeasible);
    }

    #[test]
    fn rejects_unbalanced_and_negative_cost() {
        let mut net = McfNetwork::new(2);
        net.demand = vec![1, 0];
        assert!(solve_mcf(&net).is_err());
        let mut net = McfNetwork::new(2);
        net.add_edge(0, 1, -1, 0, Finite(1));
        assert!(solve_mcf(&net).is_err());
    }

    #[test]
    fn prefers_cheaper_parallel_route() {
        let mut net = McfNetwork::new(2);
        net.demand = vec![5, -5];
        net.add_edge(0, 1, 3, 0, Finite(4));
        net.add_edge(0, 1, 1, 0, Finite(2));
        let sol = solve_mcf(&net).unwrap();
        assert_eq!(sol.flow, vec![3, 2]);
        assert_eq!(sol.cost, 11);
    }
}

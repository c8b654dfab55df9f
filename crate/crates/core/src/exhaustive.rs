//! Ground-truth front computation by exhaustive simple-path enumeration.
//!
//! This is the independent oracle used by the verification harness and the
//! test suite. It shares nothing with the planners' search path: dominance is
//! re-implemented locally and paths are enumerated by plain DFS. Only viable
//! on small graphs (simple path counts explode quickly).

use crate::costvec::{Cost, CostVec};
use crate::graph::{DynGraph, NodeId};

fn strictly_dominates(a: &CostVec, b: &CostVec) -> bool {
    let mut strict = false;
    for (x, y) in a.components().iter().zip(b.components()) {
        if x > y {
            return false;
        }
        if x < y {
            strict = true;
        }
    }
    strict
}

/// Cost vectors of all simple paths from `from` to `to` over finite edges.
pub fn enumerate_path_costs(graph: &DynGraph, from: NodeId, to: NodeId) -> Vec<CostVec> {
    let mut costs = Vec::new();
    let mut visited = vec![false; graph.num_nodes()];
    let mut acc = CostVec::zeros(graph.m());
    dfs(graph, from, to, &mut visited, &mut acc, &mut costs);
    costs
}

fn dfs(
    graph: &DynGraph,
    at: NodeId,
    to: NodeId,
    visited: &mut [bool],
    acc: &mut CostVec,
    out: &mut Vec<CostVec>,
) {
    if at == to {
        out.push(acc.clone());
        return;
    }
    visited[at as usize] = true;
    for &w in graph.neighbors(at) {
        if visited[w as usize] {
            continue;
        }
        let c = graph.cost(at, w).expect("adjacency without cost");
        if !c.is_finite() {
            continue;
        }
        let prev = acc.clone();
        *acc = &*acc + c;
        dfs(graph, w, to, visited, acc, out);
        *acc = prev;
    }
    visited[at as usize] = false;
}

/// The cost-unique Pareto-optimal front between `from` and `to`, sorted
/// lexicographically. Empty when no path exists.
pub fn enumerate_front(graph: &DynGraph, from: NodeId, to: NodeId) -> Vec<CostVec> {
    let costs = enumerate_path_costs(graph, from, to);
    let mut front = Vec::new();
    'outer: for (i, v) in costs.iter().enumerate() {
        for (j, w) in costs.iter().enumerate() {
            if i == j {
                continue;
            }
            if strictly_dominates(w, v) || (w == v && j < i) {
                continue 'outer;
            }
        }
        front.push(v.clone());
    }
    front.sort();
    front
}

/// Componentwise minimum over all simple paths, for admissibility checks.
/// `None` when no path exists.
pub fn componentwise_minimum(graph: &DynGraph, from: NodeId, to: NodeId) -> Option<CostVec> {
    let costs = enumerate_path_costs(graph, from, to);
    let mut min: Option<Vec<Cost>> = None;
    for c in costs {
        match &mut min {
            None => min = Some(c.components().to_vec()),
            Some(acc) => {
                for (slot, comp) in acc.iter_mut().zip(c.components()) {
                    if comp < slot {
                        *slot = *comp;
                    }
                }
            }
        }
    }
    min.map(CostVec::new)
}

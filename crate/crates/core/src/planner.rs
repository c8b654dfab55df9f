//! Common interface the simulator drives: plan, ingest an edge change, move
//! the start node, extract a solution path per front vector.

use crate::costvec::CostVec;
use crate::graph::{DynGraph, NodeId};
use std::time::Instant;

/// Result of one planning task.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plan {
    /// Cost-unique front at the current start node, sorted lexicographically.
    pub front: Vec<CostVec>,
    /// Expansions performed by this task (path or node expansions, depending
    /// on the planner).
    pub expansions: u64,
}

/// The planning task exceeded its deadline. The planner's internal state is
/// unspecified afterwards; callers abort the instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TimedOut;

pub trait Planner {
    fn name(&self) -> &str;

    /// Solve the current planning task. Incremental planners reuse previous
    /// search effort; from-scratch planners start over.
    fn plan(&mut self, graph: &DynGraph, deadline: Option<Instant>) -> Result<Plan, TimedOut>;

    /// Ingest one edge whose cost has already been mutated in `graph`.
    fn edge_updated(&mut self, graph: &DynGraph, u: NodeId, w: NodeId);

    /// Move the start node (the robot advanced).
    fn set_start(&mut self, u_c: NodeId);

    /// A solution path (start node first) realizing `cost`, which must be a
    /// member of the front returned by the last `plan` call.
    fn front_path(&self, graph: &DynGraph, cost: &CostVec) -> Option<Vec<NodeId>>;
}

/// Reconstruct a path achieving `cost` from `from` to `root` by greedy label
/// decomposition: at every node, step to the lowest-id neighbor whose label
/// set contains the exact remaining vector.
///
/// For exact searches the label sets of every planner answer these membership
/// queries identically (a suffix of a Pareto-optimal path is itself
/// non-dominated at its node), so the reconstructed path does not depend on
/// which planner produced the labels.
pub fn decompose_path(
    graph: &DynGraph,
    from: NodeId,
    root: NodeId,
    cost: &CostVec,
    has_label: &dyn Fn(NodeId, &CostVec) -> bool,
) -> Option<Vec<NodeId>> {
    let mut path = vec![from];
    let mut cur = from;
    let mut remaining = cost.clone();
    let step_cap = graph.num_nodes().saturating_mul(64) + 64;
    while cur != root {
        if path.len() > step_cap {
            return None;
        }
        let mut next = None;
        for &w in graph.neighbors(cur) {
            let c = graph.cost(cur, w).expect("adjacency without cost");
            if let Some(r) = remaining.checked_sub(c) {
                if has_label(w, &r) {
                    next = Some((w, r));
                    break;
                }
            }
        }
        let (w, r) = next?;
        path.push(w);
        cur = w;
        remaining = r;
    }
    if remaining == CostVec::zeros(cost.m()) {
        Some(path)
    } else {
        None
    }
}

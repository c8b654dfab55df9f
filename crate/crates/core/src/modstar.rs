//! Node-based incremental baseline.
//!
//! Every node carries a G-set (derived from the neighbors' V-sets plus the
//! connecting edge cost) and a V-set (the labels committed at the node's last
//! expansion); a node is consistent when the two sets are equal. The planner
//! expands inconsistent nodes in lexicographic key order. Expanding a node
//! with stale V labels (labels in V but no longer in G) first clears its
//! V-set so that stale values cannot keep supporting each other through
//! cycles; expanding an otherwise inconsistent node copies G into V. Either
//! way the neighbors' G-sets are recomputed eagerly.
//!
//! Nodes whose entire F-set is weakly dominated by the current solution set
//! are skipped, and a final fixed-point scan re-queues any skipped node the
//! termination condition no longer covers.

use crate::costvec::{nd_filter, CostVec, NdKernel};
use crate::graph::{DynGraph, Heuristic, NodeId};
use crate::planner::{decompose_path, Plan, Planner, TimedOut};
use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};
use std::time::Instant;

const DEADLINE_POLL_MASK: u64 = 1023;

pub struct ModStarPlanner {
    u_d: NodeId,
    u_c: NodeId,
    heuristic: Box<dyn Heuristic>,
    g_sets: Vec<BTreeSet<CostVec>>,
    v_sets: Vec<BTreeSet<CostVec>>,
    inconsistent: BTreeSet<NodeId>,
}

impl ModStarPlanner {
    pub fn new(
        graph: &DynGraph,
        u_d: NodeId,
        u_c: NodeId,
        heuristic: Box<dyn Heuristic>,
    ) -> ModStarPlanner {
        assert!(
            (u_d as usize) < graph.num_nodes(),
            "destination not in graph"
        );
        let mut p = ModStarPlanner {
            u_d,
            u_c,
            heuristic,
            g_sets: vec![BTreeSet::new(); graph.num_nodes()],
            v_sets: vec![BTreeSet::new(); graph.num_nodes()],
            inconsistent: BTreeSet::new(),
        };
        p.g_sets[u_d as usize].insert(CostVec::zeros(graph.m()));
        p.refresh_consistency(u_d);
        p
    }

    pub fn g_set(&self, u: NodeId) -> &BTreeSet<CostVec> {
        &self.g_sets[u as usize]
    }

    pub fn v_set(&self, u: NodeId) -> &BTreeSet<CostVec> {
        &self.v_sets[u as usize]
    }

    fn refresh_consistency(&mut self, u: NodeId) {
        if self.g_sets[u as usize] == self.v_sets[u as usize] {
            self.inconsistent.remove(&u);
        } else {
            self.inconsistent.insert(u);
        }
    }

    /// Recompute `G(u)` from the neighbors' V-sets; the destination keeps its
    /// pinned zero label. Returns whether the set changed.
    fn recompute_g(&mut self, graph: &DynGraph, u: NodeId) -> bool {
        if u == self.u_d {
            return false;
        }
        let mut candidates: Vec<CostVec> = Vec::new();
        for &w in graph.neighbors(u) {
            let c = graph.cost(u, w).expect("adjacency without cost");
            if !c.is_finite() {
                continue;
            }
            for v in &self.v_sets[w as usize] {
                let cand = v + c;
                if cand.is_finite() {
                    candidates.push(cand);
                }
            }
        }
        let new_g: BTreeSet<CostVec> = nd_filter(NdKernel::Kung2d, &candidates)
            .into_iter()
            .collect();
        let changed = new_g != self.g_sets[u as usize];
        if changed {
            self.g_sets[u as usize] = new_g;
        }
        self.refresh_consistency(u);
        changed
    }

    /// Lexicographic node key: the minimal f-vector over both label sets
    /// (stale V labels must be able to schedule their own cleanup).
    fn key(&self, u: NodeId) -> Option<CostVec> {
        let h = self.heuristic.estimate(u, self.u_c);
        self.g_sets[u as usize]
            .iter()
            .chain(&self.v_sets[u as usize])
            .map(|g| g + &h)
            .min()
    }

    fn is_underconsistent(&self, u: NodeId) -> bool {
        self.v_sets[u as usize]
            .iter()
            .any(|v| !self.g_sets[u as usize].contains(v))
    }

    /// Every F-vector of `u` is weakly dominated by some current solution,
    /// so expanding it cannot contribute a cost-unique Pareto solution.
    fn dominated_by_solutions(&self, u: NodeId) -> bool {
        let h = self.heuristic.estimate(u, self.u_c);
        let front = &self.v_sets[self.u_c as usize];
        self.g_sets[u as usize].iter().all(|g| {
            let f = g + &h;
            front.iter().any(|c| c.weakly_dominates(&f))
        })
    }

    /// Flush stale V labels to exhaustion: while any node carries a V label
    /// no longer in its G-set, drop the unsupported labels and recompute the
    /// neighbors' G-sets. The wave only ever removes V labels, so it
    /// terminates; interleaving it with rebuilding is what would let stale
    /// values circulate through cycles and grow without bound. Returns every
    /// node it touched, for re-queueing.
    fn flush_underconsistent(&mut self, graph: &DynGraph) -> Vec<NodeId> {
        let mut work: Vec<NodeId> = self
            .inconsistent
            .iter()
            .copied()
            .filter(|&u| self.is_underconsistent(u))
            .collect();
        let mut touched = Vec::new();
        while let Some(u) = work.pop() {
            if !self.is_underconsistent(u) {
                continue;
            }
            let supported: BTreeSet<CostVec> = self.v_sets[u as usize]
                .intersection(&self.g_sets[u as usize])
                .cloned()
                .collect();
            self.v_sets[u as usize] = supported;
            self.refresh_consistency(u);
            touched.push(u);
            for w in graph.neighbors(u).to_vec() {
                if self.recompute_g(graph, w) {
                    touched.push(w);
                    if self.is_underconsistent(w) {
                        work.push(w);
                    }
                }
            }
        }
        touched
    }

    /// Overconsistent expansion: commit G into V and propagate to the
    /// neighbors. Returns the touched nodes.
    fn expand(&mut self, graph: &DynGraph, u: NodeId) -> Vec<NodeId> {
        debug_assert!(!self.is_underconsistent(u), "expand after flush only");
        self.v_sets[u as usize] = self.g_sets[u as usize].clone();
        self.refresh_consistency(u);
        let mut touched = vec![u];
        for w in graph.neighbors(u).to_vec() {
            if self.recompute_g(graph, w) {
                touched.push(w);
            }
        }
        touched
    }

    /// Expand inconsistent nodes until none can still affect the solution
    /// set, then return `V(u_c)`.
    pub fn compute_path(
        &mut self,
        graph: &DynGraph,
        deadline: Option<Instant>,
    ) -> Result<Plan, TimedOut> {
        let mut expansions = 0u64;
        let mut pops = 0u64;
        let mut heap: BinaryHeap<Reverse<(CostVec, NodeId)>> = BinaryHeap::new();
        let enqueue = |heap: &mut BinaryHeap<_>, planner: &ModStarPlanner, u: NodeId| {
            if planner.inconsistent.contains(&u) {
                if let Some(key) = planner.key(u) {
                    heap.push(Reverse((key, u)));
                }
            }
        };

        for u in self.flush_underconsistent(graph) {
            enqueue(&mut heap, self, u);
        }
        let seed: Vec<NodeId> = self.inconsistent.iter().copied().collect();
        for u in seed {
            enqueue(&mut heap, self, u);
        }

        loop {
            while let Some(Reverse((_, u))) = heap.pop() {
                pops += 1;
                if pops & DEADLINE_POLL_MASK == 0 {
                    if let Some(d) = deadline {
                        if Instant::now() >= d {
                            return Err(TimedOut);
                        }
                    }
                }
                if !self.inconsistent.contains(&u) {
                    continue;
                }
                if self.dominated_by_solutions(u) {
                    continue; // skipped; the fixed-point scan re-checks it
                }
                expansions += 1;
                for t in self.expand(graph, u) {
                    enqueue(&mut heap, self, t);
                }
                // Committing better labels can strand previously committed
                // ones; flush before expanding anything else.
                for t in self.flush_underconsistent(graph) {
                    enqueue(&mut heap, self, t);
                }
            }

            // Fixed point check: every skipped node must still be covered by
            // the final solution set.
            let violators: Vec<NodeId> = self
                .inconsistent
                .iter()
                .copied()
                .filter(|&u| self.is_underconsistent(u) || !self.dominated_by_solutions(u))
                .collect();
            if violators.is_empty() {
                break;
            }
            for u in violators {
                if let Some(key) = self.key(u) {
                    heap.push(Reverse((key, u)));
                }
            }
        }

        Ok(Plan {
            front: self.v_sets[self.u_c as usize].iter().cloned().collect(),
            expansions,
        })
    }

    /// Edge cost already mutated in the graph: recompute both endpoint G-sets
    /// and let the next `compute_path` pick up the inconsistency.
    pub fn process_edge(&mut self, graph: &DynGraph, u1: NodeId, u2: NodeId) {
        assert!(graph.is_edge(u1, u2), "({u1},{u2}) is not an edge");
        self.recompute_g(graph, u1);
        self.recompute_g(graph, u2);
    }
}

impl Planner for ModStarPlanner {
    fn name(&self) -> &str {
        "mod"
    }

    fn plan(&mut self, graph: &DynGraph, deadline: Option<Instant>) -> Result<Plan, TimedOut> {
        self.compute_path(graph, deadline)
    }

    fn edge_updated(&mut self, graph: &DynGraph, u: NodeId, w: NodeId) {
        self.process_edge(graph, u, w);
    }

    fn set_start(&mut self, u_c: NodeId) {
        self.u_c = u_c;
    }

    fn front_path(&self, graph: &DynGraph, cost: &CostVec) -> Option<Vec<NodeId>> {
        decompose_path(graph, self.u_c, self.u_d, cost, &|node, g| {
            self.v_sets[node as usize].contains(g)
        })
    }
}

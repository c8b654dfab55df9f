//! From-scratch multi-objective A* with path-based expansion: the baseline
//! every incremental planner is checked against. Each planning task builds a
//! fresh search; nothing is carried over.
//!
//! The open-list discipline (lexicographic f-keys, same tie-breaks) matches
//! the incremental planner so expansion counts are directly comparable, but
//! the search loop here is written independently: no reserve queue, no
//! deletion, no V-set repair.

use crate::costvec::CostVec;
use crate::graph::{DynGraph, Heuristic, NodeId};
use crate::labels::{LabelStore, OpenList, StateArena};
use crate::planner::{decompose_path, Plan, Planner, TimedOut};
use std::time::Instant;

const DEADLINE_POLL_MASK: u64 = 1023;

/// Stateless baseline planner; `plan` solves the current task from scratch.
pub struct NamoaPlanner {
    u_d: NodeId,
    u_c: NodeId,
    eps: f64,
    heuristic: Box<dyn Heuristic>,
    name: String,
    // Search data of the last task, kept for path extraction.
    arena: StateArena,
    store: LabelStore,
}

impl NamoaPlanner {
    pub fn new(u_d: NodeId, u_c: NodeId, heuristic: Box<dyn Heuristic>, eps: f64) -> NamoaPlanner {
        assert!(eps >= 0.0, "eps must be non-negative");
        let name = if eps > 0.0 { "namoa-eps" } else { "namoa" };
        NamoaPlanner {
            u_d,
            u_c,
            eps,
            heuristic,
            name: name.to_string(),
            arena: StateArena::new(),
            store: LabelStore::new(0),
        }
    }

    fn prunes(&self, a: &CostVec, b: &CostVec) -> bool {
        if self.eps > 0.0 {
            a.eps_dominates(b, self.eps)
        } else {
            a.weakly_dominates(b)
        }
    }

    /// One full search from `u_d` back to `u_c`; returns the front plus the
    /// number of path expansions.
    pub fn solve(&mut self, graph: &DynGraph, deadline: Option<Instant>) -> Result<Plan, TimedOut> {
        let mut arena = StateArena::new();
        let mut store = LabelStore::new(graph.num_nodes());
        let mut open = OpenList::new();
        let mut expansions = 0u64;
        let mut pops = 0u64;

        let zero = CostVec::zeros(graph.m());
        let root = arena.alloc(self.u_d, zero.clone());
        store.g_insert(self.u_d, zero.clone(), root);
        open.push(self.heuristic.estimate(self.u_d, self.u_c), zero, root);

        while let Some(sid) = open.pop_where(|_| true) {
            pops += 1;
            if pops & DEADLINE_POLL_MASK == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(TimedOut);
                    }
                }
            }
            let (node, g) = {
                let s = arena.get(sid).expect("namoa states are never freed");
                (s.node, s.g.clone())
            };
            let f = &g + &self.heuristic.estimate(node, self.u_c);

            // Filtered by the solutions found so far.
            if store.v_labels(self.u_c).any(|v| self.prunes(v, &f)) {
                continue;
            }
            // Dominated by a closed label at the same node.
            if store.v_labels(node).any(|v| self.prunes(v, &g)) {
                continue;
            }
            // Close the label; drop closed labels it now prunes.
            let pruned: Vec<CostVec> = store
                .v_labels(node)
                .filter(|v| self.prunes(&g, v))
                .cloned()
                .collect();
            for v in pruned {
                store.v_remove(node, &v);
            }
            store.v_insert(node, g.clone());

            expansions += 1;
            for &w in graph.neighbors(node) {
                let c = graph.cost(node, w).expect("adjacency without cost");
                let g2 = &g + c;
                if !g2.is_finite() {
                    continue;
                }
                if store.g_labels(w).any(|(gg, _)| self.prunes(gg, &g2)) {
                    continue;
                }
                let child = arena.alloc(w, g2.clone());
                store.g_insert(w, g2.clone(), child);
                arena.link(sid, child);
                let f2 = &g2 + &self.heuristic.estimate(w, self.u_c);
                open.push(f2, g2, child);
            }
        }

        let front: Vec<CostVec> = store.v_labels(self.u_c).cloned().collect();
        self.arena = arena;
        self.store = store;
        Ok(Plan { front, expansions })
    }

    fn parent_chain_path(&self, cost: &CostVec) -> Option<Vec<NodeId>> {
        let mut id = self.store.g_owner(self.u_c, cost)?;
        let mut path = Vec::new();
        loop {
            let s = self.arena.get(id)?;
            path.push(s.node);
            match s.parent {
                Some(p) => id = p,
                None => break,
            }
        }
        (path.last() == Some(&self.u_d)).then_some(path)
    }
}

impl Planner for NamoaPlanner {
    fn name(&self) -> &str {
        &self.name
    }

    fn plan(&mut self, graph: &DynGraph, deadline: Option<Instant>) -> Result<Plan, TimedOut> {
        self.solve(graph, deadline)
    }

    fn edge_updated(&mut self, _graph: &DynGraph, _u: NodeId, _w: NodeId) {
        // From scratch every task: nothing to ingest.
    }

    fn set_start(&mut self, u_c: NodeId) {
        self.u_c = u_c;
    }

    fn front_path(&self, graph: &DynGraph, cost: &CostVec) -> Option<Vec<NodeId>> {
        if self.eps > 0.0 {
            return self.parent_chain_path(cost);
        }
        decompose_path(graph, self.u_c, self.u_d, cost, &|node, g| {
            self.store.v_contains(node, g)
        })
        .or_else(|| self.parent_chain_path(cost))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exhaustive::enumerate_front;
    use crate::graph::{GridMap, ManhattanHeuristic, ZeroHeuristic};
    use crate::mopbd::{PlannerConfig, Session};

    fn cv(components: &[u64]) -> CostVec {
        CostVec::from_finite(components)
    }

    #[test]
    fn diamond_front() {
        let mut g = DynGraph::new(4, 2);
        g.add_edge(0, 1, cv(&[1, 3]));
        g.add_edge(0, 2, cv(&[3, 1]));
        g.add_edge(1, 3, cv(&[1, 3]));
        g.add_edge(2, 3, cv(&[3, 1]));
        let mut p = NamoaPlanner::new(0, 3, Box::new(ZeroHeuristic { m: 2 }), 0.0);
        let plan = p.solve(&g, None).unwrap();
        assert_eq!(plan.front, vec![cv(&[2, 6]), cv(&[6, 2])]);
    }

    #[test]
    fn start_equals_destination() {
        let mut g = DynGraph::new(2, 2);
        g.add_edge(0, 1, cv(&[1, 1]));
        let mut p = NamoaPlanner::new(0, 0, Box::new(ZeroHeuristic { m: 2 }), 0.0);
        assert_eq!(p.solve(&g, None).unwrap().front, vec![CostVec::zeros(2)]);
    }

    #[test]
    fn seeded_grids_match_enumeration_and_incremental() {
        for seed in 100..120 {
            let grid = GridMap::empty(4, 4);
            let g = DynGraph::assign_random_costs(&grid, 2, 1, 10, seed);
            let (u_d, u_o) = (grid.node(3, 3), grid.node(0, 2));
            let h = ManhattanHeuristic { width: 4, m: 2 };
            let mut namoa = NamoaPlanner::new(u_d, u_o, Box::new(h), 0.0);
            let plan = namoa.solve(&g, None).unwrap();
            assert_eq!(plan.front, enumerate_front(&g, u_o, u_d), "seed {seed}");

            let mut inc = Session::new(&g, u_d, u_o, Box::new(h), PlannerConfig::default());
            let plan2 = inc.compute_path(&g, None).unwrap();
            assert_eq!(plan.front, plan2.front, "seed {seed}");
            // Identical discipline on a fresh task: identical expansion counts.
            assert_eq!(plan.expansions, plan2.expansions, "seed {seed}");
        }
    }

    #[test]
    fn no_path_gives_empty_front() {
        let mut g = DynGraph::new(3, 2);
        g.add_edge(0, 1, cv(&[1, 1]));
        let mut p = NamoaPlanner::new(0, 2, Box::new(ZeroHeuristic { m: 2 }), 0.0);
        assert!(p.solve(&g, None).unwrap().front.is_empty());
    }

    #[test]
    fn paths_are_reconstructible() {
        let grid = GridMap::empty(4, 4);
        let g = DynGraph::assign_random_costs(&grid, 2, 1, 10, 5);
        let (u_d, u_o) = (grid.node(0, 3), grid.node(3, 0));
        let h = ManhattanHeuristic { width: 4, m: 2 };
        let mut p = NamoaPlanner::new(u_d, u_o, Box::new(h), 0.0);
        let plan = p.solve(&g, None).unwrap();
        for cost in &plan.front {
            let path = p.front_path(&g, cost).unwrap();
            assert_eq!(path.first(), Some(&u_o));
            assert_eq!(path.last(), Some(&u_d));
            // Re-sum the edges and compare.
            let mut acc = CostVec::zeros(2);
            for pair in path.windows(2) {
                acc = &acc + g.cost(pair[0], pair[1]).unwrap();
            }
            assert_eq!(&acc, cost);
        }
    }
}

//! Incremental multi-objective planner with path-based expansion.
//!
//! The session searches backwards from a fixed destination `u_d` towards the
//! robot's current node `u_c`, keeping the whole search tree alive across
//! planning tasks. An edge-cost change deletes exactly the subtrees that
//! crossed the edge and regenerates the inconsistent states implied by the
//! neighbors' V-sets; moving `u_c` only re-keys the open list. With `eps = 0`
//! the returned front is the exact cost-unique Pareto front; with `eps > 0`
//! every pruning test is relaxed to eps-dominance and the front becomes a
//! bounded approximation.

use crate::costvec::{nd_filter, CostVec, NdKernel};
use crate::graph::{DynGraph, Heuristic, NodeId};
use crate::labels::{audit_bijection, LabelStore, OpenList, ReserveQueue, StateArena, StateId};
use crate::planner::{decompose_path, Plan, Planner, TimedOut};
use std::collections::BTreeSet;
use std::time::Instant;

/// How often the search loop polls the deadline, in pops.
const DEADLINE_POLL_MASK: u64 = 1023;

#[derive(Clone, Copy, Debug)]
pub struct PlannerConfig {
    /// 0 = exact; > 0 relaxes every pruning comparison to eps-dominance.
    pub eps: f64,
    pub nd_kernel: NdKernel,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            eps: 0.0,
            nd_kernel: NdKernel::Naive,
        }
    }
}

/// Cumulative work counters for one session.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SessionStats {
    pub expansions: u64,
    pub pops: u64,
    pub deletes: u64,
}

/// One incremental search session. Strictly single-threaded; distinct
/// sessions are independent.
pub struct Session {
    u_d: NodeId,
    u_c: NodeId,
    config: PlannerConfig,
    heuristic: Box<dyn Heuristic>,
    arena: StateArena,
    store: LabelStore,
    open: OpenList,
    stats: SessionStats,
    name: String,
}

impl Session {
    /// Initialize with the root state `(u_d, 0)` in the open list: the root
    /// label is in `G(u_d)` but not yet in `V(u_d)`, hence inconsistent.
    ///
    /// The heuristic must be admissible (componentwise no larger than any
    /// path cost towards the current start node); the solution filter
    /// compares f-vectors against the front and relies on it.
    pub fn new(
        graph: &DynGraph,
        u_d: NodeId,
        u_c: NodeId,
        heuristic: Box<dyn Heuristic>,
        config: PlannerConfig,
    ) -> Session {
        assert!(
            (u_d as usize) < graph.num_nodes(),
            "destination not in graph"
        );
        assert!((u_c as usize) < graph.num_nodes(), "start not in graph");
        assert!(config.eps >= 0.0, "eps must be non-negative");
        let mut arena = StateArena::new();
        let mut store = LabelStore::new(graph.num_nodes());
        let mut open = OpenList::new();
        let zero = CostVec::zeros(graph.m());
        let root = arena.alloc(u_d, zero.clone());
        store.g_insert(u_d, zero.clone(), root);
        let f = heuristic.estimate(u_d, u_c);
        open.push(f, zero, root);
        let name = match (config.eps > 0.0, config.nd_kernel) {
            (true, _) => "mopbd-eps",
            (false, NdKernel::Kung2d) => "mopbd-i",
            (false, NdKernel::Naive) => "mopbd",
        };
        Session {
            u_d,
            u_c,
            config,
            heuristic,
            arena,
            store,
            open,
            stats: SessionStats::default(),
            name: name.to_string(),
        }
    }

    pub fn destination(&self) -> NodeId {
        self.u_d
    }

    pub fn start(&self) -> NodeId {
        self.u_c
    }

    pub fn stats(&self) -> SessionStats {
        self.stats
    }

    pub fn store(&self) -> &LabelStore {
        &self.store
    }

    fn h(&self, node: NodeId) -> CostVec {
        self.heuristic.estimate(node, self.u_c)
    }

    /// The pruning comparison: weak dominance when exact, eps-dominance when
    /// approximating.
    fn prunes(&self, a: &CostVec, b: &CostVec) -> bool {
        if self.config.eps > 0.0 {
            a.eps_dominates(b, self.config.eps)
        } else {
            a.weakly_dominates(b)
        }
    }

    /// Current solution front `V(u_c)`, sorted lexicographically.
    pub fn front(&self) -> Vec<CostVec> {
        self.store.v_labels(self.u_c).cloned().collect()
    }

    /// Run the search loop until the open list is empty, then reserve the
    /// solution-filtered states for the next task and return the front.
    ///
    /// On timeout the session's internal state is unspecified and the caller
    /// must discard it.
    pub fn compute_path(
        &mut self,
        graph: &DynGraph,
        deadline: Option<Instant>,
    ) -> Result<Plan, TimedOut> {
        let mut reserve = ReserveQueue::new();
        let expansions_before = self.stats.expansions;

        loop {
            let (arena, store) = (&self.arena, &self.store);
            let Some(sid) = self.open.pop_where(|id| {
                arena
                    .get(id)
                    .is_some_and(|s| store.g_owner(s.node, &s.g) == Some(id))
            }) else {
                break;
            };
            self.stats.pops += 1;
            if self.stats.pops & DEADLINE_POLL_MASK == 0 {
                if let Some(d) = deadline {
                    if Instant::now() >= d {
                        return Err(TimedOut);
                    }
                }
            }

            let (node, g) = {
                let s = self.arena.get(sid).expect("validated pop");
                (s.node, s.g.clone())
            };
            debug_assert!(!self.store.v_contains(node, &g), "consistent state in OPEN");
            let f = &g + &self.h(node);

            // Filtered by solutions: reserved for the next planning task.
            if self.store.v_labels(self.u_c).any(|v| self.prunes(v, &f)) {
                reserve.push(sid);
                continue;
            }
            // Dominated at its own node: the label is discarded for good.
            if self.store.v_labels(node).any(|v| self.prunes(v, &g)) {
                self.store.g_remove_if_owner(node, &g, sid);
                self.arena.unlink(sid);
                self.arena.free(sid);
                continue;
            }

            self.update_vset(graph, sid);
            debug_assert!(self.arena.is_live(sid), "expanded state deleted itself");

            // Expand: extend the path represented by `sid` to every neighbor.
            self.stats.expansions += 1;
            for &w in graph.neighbors(node) {
                let c = graph.cost(node, w).expect("adjacency without cost");
                let g2 = &g + c;
                if !g2.is_finite() {
                    continue;
                }
                if self.store.g_labels(w).any(|(gg, _)| self.prunes(gg, &g2)) {
                    continue;
                }
                let child = self.arena.alloc(w, g2.clone());
                self.store.g_insert(w, g2.clone(), child);
                self.arena.link(sid, child);
                let f2 = &g2 + &self.h(w);
                self.open.push(f2, g2, child);
            }
        }

        // OPEN <- Q: reserved states seed the next planning task. A reserved
        // state may have died since (a later expansion can delete the subtree
        // it hangs from), so re-validate instead of trusting the queue.
        for sid in reserve.drain() {
            let Some(s) = self.arena.get(sid) else {
                continue;
            };
            if self.store.g_owner(s.node, &s.g) != Some(sid) {
                continue;
            }
            let f = &s.g + &self.h(s.node);
            self.open.push(f, s.g.clone(), sid);
        }

        Ok(Plan {
            front: self.front(),
            expansions: self.stats.expansions - expansions_before,
        })
    }

    /// Make `sid` consistent: remove (with subtrees) every V label at its
    /// node that the new label prunes, insert the new label into V, then
    /// regenerate the inconsistent states implied by the deletions.
    fn update_vset(&mut self, graph: &DynGraph, sid: StateId) {
        let (node, g) = {
            let s = self.arena.get(sid).expect("update_vset on dead state");
            (s.node, s.g.clone())
        };
        let mut touched = BTreeSet::new();
        let victims: Vec<CostVec> = self
            .store
            .v_labels(node)
            .filter(|v| self.prunes(&g, v))
            .cloned()
            .collect();
        for victim in victims {
            // Equality cannot occur: it would have been filtered on pop.
            assert_ne!(victim, g, "expanding a label already in V");
            if !self.store.v_contains(node, &victim) {
                continue; // removed by an earlier cascade
            }
            let owner = self
                .store
                .g_owner(node, &victim)
                .expect("V label without owning state");
            self.delete_subtree(owner, &mut touched);
        }
        self.store.v_insert(node, g);
        self.repair_inconsistent(graph, &touched);
    }

    /// Iterative subtree deletion (explicit stack; trees get deep on large
    /// maps). Removes each state's label from G, and from V when present,
    /// then severs all tree pointers. Dead ids are skipped, which makes
    /// deletion idempotent.
    ///
    /// Every node that lost a label is collected into `touched` for repair,
    /// not only the ones whose V-set changed: a label that was only in G may
    /// have pruned generation-time candidates that must now be rebuilt from
    /// the neighbors' V-sets, otherwise the next search is incomplete.
    fn delete_subtree(&mut self, root: StateId, touched: &mut BTreeSet<NodeId>) {
        let mut stack = vec![root];
        while let Some(id) = stack.pop() {
            let Some(state) = self.arena.free(id) else {
                continue;
            };
            self.stats.deletes += 1;
            stack.extend(state.children);
            if self.store.g_remove_if_owner(state.node, &state.g, id) {
                touched.insert(state.node);
                self.store.v_remove(state.node, &state.g);
            }
            if let Some(parent) = state.parent {
                if let Some(p) = self.arena.get_mut(parent) {
                    p.children.retain(|&c| c != id);
                }
            }
        }
    }

    /// For every node whose V-set lost labels, recompute its G-set from the
    /// neighbors' V-sets and materialize each missing label as a fresh
    /// inconsistent state in the open list, linked to the owning state of the
    /// lowest-id neighbor that attains it.
    fn repair_inconsistent(&mut self, graph: &DynGraph, touched: &BTreeSet<NodeId>) {
        for &u in touched {
            if u == self.u_d {
                continue; // G(u_d) is pinned to {0}
            }
            let mut candidates: Vec<(CostVec, StateId)> = Vec::new();
            for &w in graph.neighbors(u) {
                let c = graph.cost(u, w).expect("adjacency without cost");
                if !c.is_finite() {
                    continue;
                }
                for v in self.store.v_labels(w) {
                    let cand = v + c;
                    if !cand.is_finite() {
                        continue;
                    }
                    let owner = self
                        .store
                        .g_owner(w, v)
                        .expect("V label without owning state");
                    candidates.push((cand, owner));
                }
            }
            let values: Vec<CostVec> = candidates.iter().map(|(c, _)| c.clone()).collect();
            for label in nd_filter(self.config.nd_kernel, &values) {
                if self.store.g_owner(u, &label).is_some() {
                    continue;
                }
                let (_, parent) = candidates
                    .iter()
                    .find(|(c, _)| *c == label)
                    .expect("nd output not among candidates");
                let child = self.arena.alloc(u, label.clone());
                self.store.g_insert(u, label.clone(), child);
                self.arena.link(*parent, child);
                let f = &label + &self.h(u);
                self.open.push(f, label, child);
            }
        }
    }

    /// Ingest a cost change on edge `(u1, u2)` (already mutated in `graph`):
    /// delete every state whose parent sits across the edge, then repair both
    /// endpoints — a cost decrease can create better labels even when nothing
    /// was deleted.
    pub fn process_edge(&mut self, graph: &DynGraph, u1: NodeId, u2: NodeId) {
        assert!(graph.is_edge(u1, u2), "({u1},{u2}) is not an edge");
        let mut touched = BTreeSet::new();
        for &u in &[u1, u2] {
            let other = if u == u1 { u2 } else { u1 };
            let labels: Vec<(CostVec, StateId)> = self
                .store
                .g_labels(u)
                .map(|(g, s)| (g.clone(), s))
                .collect();
            for (g, sid) in labels {
                if self.store.g_owner(u, &g) != Some(sid) {
                    continue; // deleted by an earlier cascade
                }
                let crosses = self
                    .arena
                    .get(sid)
                    .and_then(|s| s.parent)
                    .and_then(|p| self.arena.get(p))
                    .is_some_and(|p| p.node == other);
                if crosses {
                    self.delete_subtree(sid, &mut touched);
                }
            }
        }
        touched.insert(u1);
        touched.insert(u2);
        self.repair_inconsistent(graph, &touched);
    }

    /// Move the robot: subsequent solution filtering and heuristics target
    /// the new start node. Open-list keys are rebuilt against the new target;
    /// labels at the old start node stay, as ordinary node labels.
    pub fn set_start(&mut self, u_c: NodeId) {
        self.u_c = u_c;
        let ids = self.open.drain_ids();
        for id in ids {
            let Some(s) = self.arena.get(id) else {
                continue;
            };
            if self.store.g_owner(s.node, &s.g) != Some(id) {
                continue;
            }
            let f = &s.g + &self.h(s.node);
            self.open.push(f, s.g.clone(), id);
        }
    }

    /// Debug snapshot of the label sets and open-list keys.
    pub fn snapshot_json(&self) -> serde_json::Value {
        let open: Vec<serde_json::Value> = self
            .open
            .sorted_keys()
            .into_iter()
            .map(|(f, id)| serde_json::json!({ "f": f, "state": id.index() }))
            .collect();
        serde_json::json!({
            "u_d": self.u_d,
            "u_c": self.u_c,
            "eps": self.config.eps,
            "labels": self.store.debug_json(),
            "open": open,
        })
    }

    /// Structural audit, valid between planning tasks: live states form a
    /// tree rooted at the destination, live states and G labels are in
    /// bijection, and the inconsistent labels are exactly the ones with a
    /// live open-list entry.
    pub fn audit(&self) -> Result<(), String> {
        audit_bijection(&self.arena, &self.store)?;
        let mut queued = BTreeSet::new();
        for id in self.open.ids() {
            if let Some(s) = self.arena.get(id) {
                if self.store.g_owner(s.node, &s.g) == Some(id) {
                    queued.insert(id);
                }
            }
        }
        for (id, state) in self.arena.live_states() {
            let inconsistent = !self.store.v_contains(state.node, &state.g);
            if inconsistent && !queued.contains(&id) {
                return Err(format!(
                    "inconsistent state {id:?} at node {} not queued",
                    state.node
                ));
            }
            if !inconsistent && queued.contains(&id) {
                return Err(format!(
                    "consistent state {id:?} at node {} is queued",
                    state.node
                ));
            }
            // Every parent chain must end at the root state (u_d, zero).
            let mut cur = id;
            let mut steps = 0usize;
            loop {
                let s = self
                    .arena
                    .get(cur)
                    .ok_or(format!("dead ancestor of {id:?}"))?;
                match s.parent {
                    Some(p) => cur = p,
                    None => {
                        if s.node != self.u_d {
                            return Err(format!("state {id:?} roots at node {}", s.node));
                        }
                        break;
                    }
                }
                steps += 1;
                if steps > self.arena.live_states().count() {
                    return Err(format!("parent chain of {id:?} cycles"));
                }
            }
        }
        Ok(())
    }

    /// Path for a front vector via the live parent chain.
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

impl Planner for Session {
    fn name(&self) -> &str {
        &self.name
    }

    fn plan(&mut self, graph: &DynGraph, deadline: Option<Instant>) -> Result<Plan, TimedOut> {
        self.compute_path(graph, deadline)
    }

    fn edge_updated(&mut self, graph: &DynGraph, u: NodeId, w: NodeId) {
        self.process_edge(graph, u, w);
    }

    fn set_start(&mut self, u_c: NodeId) {
        Session::set_start(self, u_c);
    }

    fn front_path(&self, graph: &DynGraph, cost: &CostVec) -> Option<Vec<NodeId>> {
        if self.config.eps > 0.0 {
            // Approximate labels do not decompose exactly; use the tree.
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

    fn cv(components: &[u64]) -> CostVec {
        CostVec::from_finite(components)
    }

    fn diamond() -> DynGraph {
        let mut g = DynGraph::new(4, 2);
        g.add_edge(0, 1, cv(&[1, 3]));
        g.add_edge(0, 2, cv(&[3, 1]));
        g.add_edge(1, 3, cv(&[1, 3]));
        g.add_edge(2, 3, cv(&[3, 1]));
        g
    }

    fn zero_session(graph: &DynGraph, u_d: NodeId, u_c: NodeId) -> Session {
        Session::new(
            graph,
            u_d,
            u_c,
            Box::new(ZeroHeuristic { m: graph.m() }),
            PlannerConfig::default(),
        )
    }

    #[test]
    fn init_contract() {
        let g = diamond();
        let s = zero_session(&g, 0, 3);
        assert_eq!(s.open.len(), 1);
        assert_eq!(
            s.store
                .g_labels(0)
                .map(|(g, _)| g.clone())
                .collect::<Vec<_>>(),
            vec![CostVec::zeros(2)]
        );
        assert_eq!(s.store.v_len(0), 0);
    }

    #[test]
    fn diamond_front_matches_enumeration() {
        let g = diamond();
        let mut s = zero_session(&g, 0, 3);
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, vec![cv(&[2, 6]), cv(&[6, 2])]);
        assert_eq!(plan.front, enumerate_front(&g, 0, 3));
        s.audit().unwrap();
    }

    #[test]
    fn start_equals_destination() {
        let g = diamond();
        let mut s = zero_session(&g, 2, 2);
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, vec![CostVec::zeros(2)]);
    }

    #[test]
    fn replan_after_edge_becomes_infinite() {
        let mut g = diamond();
        let mut s = zero_session(&g, 0, 3);
        s.compute_path(&g, None).unwrap();

        g.set_edge_cost(0, 1, CostVec::inf(2)).unwrap();
        s.process_edge(&g, 0, 1);
        s.audit().unwrap();
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, vec![cv(&[6, 2])]);
        assert_eq!(plan.front, enumerate_front(&g, 0, 3));
    }

    #[test]
    fn replan_after_cost_decrease_creates_shortcut() {
        let mut g = diamond();
        let mut s = zero_session(&g, 0, 3);
        s.compute_path(&g, None).unwrap();

        // Cheaper B-D edge: the old [2,6] route improves to [2,4].
        g.set_edge_cost(1, 3, cv(&[1, 1])).unwrap();
        s.process_edge(&g, 1, 3);
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, enumerate_front(&g, 0, 3));
        assert_eq!(plan.front, vec![cv(&[2, 4]), cv(&[6, 2])]);
        // Weak improvement: no old vector dominates a new one.
        for new in &plan.front {
            assert!(!cv(&[2, 6]).dominates(new));
        }
    }

    #[test]
    fn untouched_edge_change_is_cheap() {
        // Diamond plus a dangling spur 3-4-5; states at 4 are reserved
        // unexpanded, so edge (4,5) carries no discovered path.
        let mut g = DynGraph::new(6, 2);
        g.add_edge(0, 1, cv(&[1, 3]));
        g.add_edge(0, 2, cv(&[3, 1]));
        g.add_edge(1, 3, cv(&[1, 3]));
        g.add_edge(2, 3, cv(&[3, 1]));
        g.add_edge(3, 4, cv(&[5, 5]));
        g.add_edge(4, 5, cv(&[5, 5]));
        let mut s = zero_session(&g, 0, 3);
        s.compute_path(&g, None).unwrap();
        let deletes_before = s.stats.deletes;
        let live_before = s.arena.live_states().count();
        g.set_edge_cost(4, 5, cv(&[9, 9])).unwrap();
        s.process_edge(&g, 4, 5);
        assert_eq!(s.stats.deletes, deletes_before);
        assert_eq!(s.arena.live_states().count(), live_before);
    }

    #[test]
    fn expand_discards_equal_candidates() {
        // Two parallel routes with identical costs: cost-unique front keeps one.
        let mut g = DynGraph::new(4, 2);
        g.add_edge(0, 1, cv(&[2, 2]));
        g.add_edge(0, 2, cv(&[2, 2]));
        g.add_edge(1, 3, cv(&[2, 2]));
        g.add_edge(2, 3, cv(&[2, 2]));
        let mut s = zero_session(&g, 0, 3);
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, vec![cv(&[4, 4])]);
        s.audit().unwrap();
    }

    #[test]
    fn update_vset_keeps_incomparable_and_prunes_dominated() {
        // Chain 0-1 with two parallel middle routes making two labels at 1.
        let mut g = DynGraph::new(5, 2);
        g.add_edge(0, 1, cv(&[1, 9]));
        g.add_edge(0, 2, cv(&[9, 1]));
        g.add_edge(1, 4, cv(&[1, 1]));
        g.add_edge(2, 4, cv(&[1, 1]));
        g.add_edge(4, 3, cv(&[1, 1]));
        let mut s = zero_session(&g, 0, 3);
        let plan = s.compute_path(&g, None).unwrap();
        // Incomparable labels both survive at node 4 and at the goal.
        assert_eq!(plan.front, vec![cv(&[3, 11]), cv(&[11, 3])]);
        let v4: Vec<CostVec> = s.store.v_labels(4).cloned().collect();
        assert_eq!(v4, vec![cv(&[2, 10]), cv(&[10, 2])]);
    }

    #[test]
    fn delete_subtree_counts() {
        let g = diamond();
        let mut s = zero_session(&g, 0, 3);
        // Build a 6-state chain by hand.
        let mut ids = Vec::new();
        let root = s.arena.alloc(0, cv(&[100, 100]));
        s.store.g_insert(0, cv(&[100, 100]), root);
        ids.push(root);
        for i in 1..6u64 {
            let node = (i % 4) as NodeId;
            let label = cv(&[100 + i, 100 + i]);
            let id = s.arena.alloc(node, label.clone());
            s.store.g_insert(node, label, id);
            s.arena.link(ids[(i - 1) as usize], id);
            ids.push(id);
        }
        let g_total_before: usize = (0..4).map(|u| s.store.g_len(u)).sum();
        let mut touched = BTreeSet::new();
        s.delete_subtree(root, &mut touched);
        let g_total_after: usize = (0..4).map(|u| s.store.g_len(u)).sum();
        assert_eq!(g_total_before - g_total_after, 6);
        // Every node that lost a label is queued for repair.
        assert_eq!(touched, BTreeSet::from([0, 1, 2, 3]));
        for id in ids {
            assert!(!s.arena.is_live(id));
        }
    }

    #[test]
    fn set_start_matches_from_scratch() {
        let grid = GridMap::empty(4, 4);
        let g = DynGraph::assign_random_costs(&grid, 2, 1, 10, 77);
        let u_d = grid.node(3, 3);
        let u_o = grid.node(0, 0);
        let h = ManhattanHeuristic { width: 4, m: 2 };
        let mut s = Session::new(&g, u_d, u_o, Box::new(h), PlannerConfig::default());
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, enumerate_front(&g, u_o, u_d));

        // Advance one step along some returned path and replan.
        let path = s.front_path(&g, &plan.front[0]).unwrap();
        let next = path[1];
        Session::set_start(&mut s, next);
        let plan2 = s.compute_path(&g, None).unwrap();
        assert_eq!(plan2.front, enumerate_front(&g, next, u_d));

        // Moving back and forth with no edge changes is stable.
        Session::set_start(&mut s, u_o);
        let plan3 = s.compute_path(&g, None).unwrap();
        assert_eq!(plan3.front, plan.front);
        s.audit().unwrap();
    }

    #[test]
    fn seeded_grids_match_enumeration() {
        for seed in 0..20 {
            let grid = GridMap::empty(4, 4);
            let g = DynGraph::assign_random_costs(&grid, 2, 1, 10, seed);
            let h = ManhattanHeuristic { width: 4, m: 2 };
            let mut s = Session::new(
                &g,
                grid.node(3, 3),
                grid.node(0, 0),
                Box::new(h),
                PlannerConfig::default(),
            );
            let plan = s.compute_path(&g, None).unwrap();
            assert_eq!(
                plan.front,
                enumerate_front(&g, grid.node(0, 0), grid.node(3, 3)),
                "seed {seed}"
            );
            s.audit().unwrap();
        }
    }

    #[test]
    fn kung_kernel_variant_agrees() {
        for seed in 0..10 {
            let grid = GridMap::empty(4, 4);
            let mut g = DynGraph::assign_random_costs(&grid, 2, 1, 10, seed);
            let h = ManhattanHeuristic { width: 4, m: 2 };
            let mk = |kernel| {
                Session::new(
                    &g,
                    grid.node(3, 3),
                    grid.node(0, 0),
                    Box::new(h),
                    PlannerConfig {
                        eps: 0.0,
                        nd_kernel: kernel,
                    },
                )
            };
            let mut a = mk(NdKernel::Naive);
            let mut b = mk(NdKernel::Kung2d);
            assert_eq!(
                a.compute_path(&g, None).unwrap().front,
                b.compute_path(&g, None).unwrap().front
            );
            let changes = g.add_obstacle(grid.node(1, 1));
            for ch in &changes {
                a.process_edge(&g, ch.u, ch.w);
                b.process_edge(&g, ch.u, ch.w);
            }
            assert_eq!(
                a.compute_path(&g, None).unwrap().front,
                b.compute_path(&g, None).unwrap().front
            );
        }
    }

    #[test]
    fn disconnection_returns_empty_front() {
        let mut g = DynGraph::new(3, 2);
        g.add_edge(0, 1, cv(&[1, 1]));
        g.add_edge(1, 2, cv(&[1, 1]));
        let mut s = zero_session(&g, 0, 2);
        assert!(!s.compute_path(&g, None).unwrap().front.is_empty());
        g.set_edge_cost(1, 2, CostVec::inf(2)).unwrap();
        s.process_edge(&g, 1, 2);
        assert!(s.compute_path(&g, None).unwrap().front.is_empty());
    }

    #[test]
    fn repair_regenerates_from_neighbor_vsets() {
        // Path 0-1-2 plus a detour 0-3-2; killing the 0-1 edge forces repair
        // to rebuild node 2's labels from node 3's V-set.
        let mut g = DynGraph::new(4, 2);
        g.add_edge(0, 1, cv(&[1, 1]));
        g.add_edge(1, 2, cv(&[1, 1]));
        g.add_edge(0, 3, cv(&[5, 5]));
        g.add_edge(3, 2, cv(&[5, 5]));
        let mut s = zero_session(&g, 0, 2);
        assert_eq!(s.compute_path(&g, None).unwrap().front, vec![cv(&[2, 2])]);

        g.set_edge_cost(0, 1, CostVec::inf(2)).unwrap();
        s.process_edge(&g, 0, 1);
        let plan = s.compute_path(&g, None).unwrap();
        assert_eq!(plan.front, vec![cv(&[10, 10])]);
        assert_eq!(plan.front, enumerate_front(&g, 0, 2));
    }

    #[test]
    fn seeded_obstacle_cycles_match_enumeration() {
        // Obstacle insertion (cost increase) followed by removal (cost
        // decrease, fresh vectors): the incremental front must track the
        // exhaustive oracle through the whole mutation sequence.
        use rand_chacha::rand_core::SeedableRng;
        for seed in 50..65u64 {
            let grid = GridMap::empty(4, 4);
            let mut g = DynGraph::assign_random_costs(&grid, 2, 1, 10, seed);
            let (u_d, u_o) = (grid.node(3, 3), grid.node(0, 0));
            let h = ManhattanHeuristic { width: 4, m: 2 };
            let mut s = Session::new(&g, u_d, u_o, Box::new(h), PlannerConfig::default());
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xdead);
            let mut old_front = s.compute_path(&g, None).unwrap().front;
            assert_eq!(old_front, enumerate_front(&g, u_o, u_d), "seed {seed}");
            for step in 0..4 {
                // Add an obstacle, then lift the same one: the removal turns
                // infinite edges finite, a pure cost decrease.
                let node = grid.node(1 + (step / 2 % 2), 1 + (step / 2 % 2));
                let changes = if step % 2 == 0 {
                    g.add_obstacle(node)
                } else {
                    g.remove_obstacle(node, 1, 5, &mut rng)
                };
                for ch in &changes {
                    s.process_edge(&g, ch.u, ch.w);
                }
                let front = s.compute_path(&g, None).unwrap().front;
                assert_eq!(
                    front,
                    enumerate_front(&g, u_o, u_d),
                    "seed {seed} step {step}"
                );
                s.audit().unwrap();
                if step % 2 == 1 {
                    // A pure cost decrease may only weakly improve the front.
                    for new in &front {
                        assert!(
                            !old_front.iter().any(|old| old.dominates(new)),
                            "seed {seed} step {step}: {new} worse than old front"
                        );
                    }
                }
                old_front = front;
            }
        }
    }

    #[test]
    fn eps_session_prunes_more() {
        let grid = GridMap::empty(6, 6);
        let g = DynGraph::assign_random_costs(&grid, 3, 1, 10, 3);
        let h = ManhattanHeuristic { width: 6, m: 3 };
        let exact = {
            let mut s = Session::new(
                &g,
                grid.node(5, 5),
                grid.node(0, 0),
                Box::new(h),
                PlannerConfig::default(),
            );
            s.compute_path(&g, None).unwrap()
        };
        let approx = {
            let mut s = Session::new(
                &g,
                grid.node(5, 5),
                grid.node(0, 0),
                Box::new(h),
                PlannerConfig {
                    eps: 0.05,
                    nd_kernel: NdKernel::Naive,
                },
            );
            s.compute_path(&g, None).unwrap()
        };
        assert!(approx.front.len() <= exact.front.len());
        assert!(approx.expansions <= exact.expansions);
        // Cover bound with L = 36.
        let factor = (1.0f64 + 0.05).powi(36);
        for c_star in &exact.front {
            let covered = approx.front.iter().any(|c| {
                c.components()
                    .iter()
                    .zip(c_star.components())
                    .all(|(a, b)| match (a, b) {
                        (crate::costvec::Cost::Finite(a), crate::costvec::Cost::Finite(b)) => {
                            (*a as f64) <= factor * (*b as f64)
                        }
                        _ => false,
                    })
            });
            assert!(covered, "{c_star} not covered");
        }
    }

    #[test]
    fn snapshot_golden() {
        let g = diamond();
        let mut s = zero_session(&g, 0, 3);
        s.compute_path(&g, None).unwrap();
        let snap = s.snapshot_json();
        let expected = serde_json::json!({
            "u_d": 0,
            "u_c": 3,
            "eps": 0.0,
            "labels": {
                "0": { "G": [[0, 0]], "V": [[0, 0]] },
                "1": { "G": [[1, 3]], "V": [[1, 3]] },
                "2": { "G": [[3, 1]], "V": [[3, 1]] },
                "3": { "G": [[2, 6], [6, 2]], "V": [[2, 6], [6, 2]] },
            },
            "open": [],
        });
        assert_eq!(snap, expected);
    }
}

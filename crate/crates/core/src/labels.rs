//! Search-state bookkeeping shared by the path-based planners: the state
//! arena with parent/children links, per-node G/V label sets, and the open
//! list with lazy invalidation of stale entries.

use crate::costvec::CostVec;
use crate::graph::NodeId;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

/// Arena index of a search state. Ids are assigned monotonically and never
/// reused, so an older state always has a smaller id.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct StateId(u32);

impl StateId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// One partial solution path rooted at the search origin: a node plus the
/// accumulated cost vector, with tree pointers for recursive deletion.
#[derive(Clone, Debug)]
pub struct State {
    pub node: NodeId,
    pub g: CostVec,
    pub parent: Option<StateId>,
    pub children: Vec<StateId>,
}

/// Central state arena. Freed slots stay empty; lookups on dead ids return
/// `None`, which makes subtree deletion idempotent.
#[derive(Clone, Debug, Default)]
pub struct StateArena {
    slots: Vec<Option<State>>,
}

impl StateArena {
    pub fn new() -> StateArena {
        StateArena::default()
    }

    pub fn alloc(&mut self, node: NodeId, g: CostVec) -> StateId {
        let id = StateId(self.slots.len() as u32);
        self.slots.push(Some(State {
            node,
            g,
            parent: None,
            children: Vec::new(),
        }));
        id
    }

    pub fn get(&self, id: StateId) -> Option<&State> {
        self.slots.get(id.index()).and_then(|s| s.as_ref())
    }

    pub fn get_mut(&mut self, id: StateId) -> Option<&mut State> {
        self.slots.get_mut(id.index()).and_then(|s| s.as_mut())
    }

    pub fn is_live(&self, id: StateId) -> bool {
        self.get(id).is_some()
    }

    /// Take the state out of the arena, leaving the slot dead.
    pub fn free(&mut self, id: StateId) -> Option<State> {
        self.slots.get_mut(id.index()).and_then(|s| s.take())
    }

    /// Bidirectional parent/children link. The child must be fresh (no
    /// parent yet); linking a state to itself is a logic error.
    pub fn link(&mut self, parent: StateId, child: StateId) {
        assert_ne!(parent, child, "cannot link a state to itself");
        let c = self.get_mut(child).expect("link: dead child");
        assert!(c.parent.is_none(), "link: child already has a parent");
        c.parent = Some(parent);
        let p = self.get_mut(parent).expect("link: dead parent");
        p.children.push(child);
    }

    /// Remove `child` from its parent's children list and clear its parent
    /// pointer. No-op when the parent slot is already dead.
    pub fn unlink(&mut self, child: StateId) {
        let Some(parent) = self.get_mut(child).and_then(|c| c.parent.take()) else {
            return;
        };
        if let Some(p) = self.get_mut(parent) {
            p.children.retain(|&c| c != child);
        }
    }

    pub fn live_states(&self) -> impl Iterator<Item = (StateId, &State)> {
        self.slots
            .iter()
            .enumerate()
            .filter_map(|(i, s)| s.as_ref().map(|s| (StateId(i as u32), s)))
    }

    /// Number of parent hops from `id` to its root.
    pub fn depth(&self, id: StateId) -> usize {
        let mut depth = 0;
        let mut cur = id;
        while let Some(parent) = self.get(cur).and_then(|s| s.parent) {
            depth += 1;
            cur = parent;
            assert!(depth <= self.slots.len(), "parent chain cycle");
        }
        depth
    }
}

/// Per-node G and V label sets.
///
/// `G(u)` maps each label to the state that owns it; `V(u)` holds the labels
/// confirmed at their owner's last expansion. A state whose label is in G but
/// not V is inconsistent and must sit in the open list or the reserve queue.
/// BTree containers keep iteration deterministic (lexicographic label order).
#[derive(Clone, Debug)]
pub struct LabelStore {
    g_sets: Vec<BTreeMap<CostVec, StateId>>,
    v_sets: Vec<BTreeSet<CostVec>>,
}

impl LabelStore {
    pub fn new(num_nodes: usize) -> LabelStore {
        LabelStore {
            g_sets: vec![BTreeMap::new(); num_nodes],
            v_sets: vec![BTreeSet::new(); num_nodes],
        }
    }

    pub fn g_insert(&mut self, node: NodeId, g: CostVec, owner: StateId) {
        let prev = self.g_sets[node as usize].insert(g, owner);
        debug_assert!(prev.is_none(), "label already owned");
    }

    pub fn g_owner(&self, node: NodeId, g: &CostVec) -> Option<StateId> {
        self.g_sets[node as usize].get(g).copied()
    }

    /// Remove the label only when `owner` still owns it; a label re-created
    /// by a newer state must survive deletion of the old one.
    pub fn g_remove_if_owner(&mut self, node: NodeId, g: &CostVec, owner: StateId) -> bool {
        match self.g_sets[node as usize].get(g) {
            Some(&o) if o == owner => {
                self.g_sets[node as usize].remove(g);
                true
            }
            _ => false,
        }
    }

    pub fn g_labels(&self, node: NodeId) -> impl Iterator<Item = (&CostVec, StateId)> {
        self.g_sets[node as usize].iter().map(|(g, &s)| (g, s))
    }

    pub fn g_len(&self, node: NodeId) -> usize {
        self.g_sets[node as usize].len()
    }

    pub fn v_insert(&mut self, node: NodeId, g: CostVec) -> bool {
        self.v_sets[node as usize].insert(g)
    }

    pub fn v_remove(&mut self, node: NodeId, g: &CostVec) -> bool {
        self.v_sets[node as usize].remove(g)
    }

    pub fn v_contains(&self, node: NodeId, g: &CostVec) -> bool {
        self.v_sets[node as usize].contains(g)
    }

    pub fn v_labels(&self, node: NodeId) -> impl Iterator<Item = &CostVec> {
        self.v_sets[node as usize].iter()
    }

    pub fn v_len(&self, node: NodeId) -> usize {
        self.v_sets[node as usize].len()
    }

    pub fn num_nodes(&self) -> usize {
        self.g_sets.len()
    }

    /// G/V sets per node as JSON, for test forensics.
    pub fn debug_json(&self) -> serde_json::Value {
        let mut nodes = serde_json::Map::new();
        for node in 0..self.g_sets.len() {
            let g: Vec<&CostVec> = self.g_sets[node].keys().collect();
            let v: Vec<&CostVec> = self.v_sets[node].iter().collect();
            if g.is_empty() && v.is_empty() {
                continue;
            }
            nodes.insert(node.to_string(), serde_json::json!({ "G": g, "V": v }));
        }
        serde_json::Value::Object(nodes)
    }
}

/// Checks that live states and G entries are in bijection: every live state
/// owns exactly the (node, label) pair it carries.
pub fn audit_bijection(arena: &StateArena, store: &LabelStore) -> Result<(), String> {
    let mut live = 0usize;
    for (id, state) in arena.live_states() {
        live += 1;
        match store.g_owner(state.node, &state.g) {
            Some(owner) if owner == id => {}
            other => {
                return Err(format!(
                    "state {id:?} at node {} with label {} owned by {other:?}",
                    state.node, state.g
                ))
            }
        }
    }
    let g_total: usize = (0..store.num_nodes())
        .map(|u| store.g_len(u as NodeId))
        .sum();
    if live != g_total {
        return Err(format!("{live} live states vs {g_total} G labels"));
    }
    for u in 0..store.num_nodes() as NodeId {
        for v in store.v_labels(u) {
            if store.g_owner(u, v).is_none() {
                return Err(format!("V label {v} at node {u} has no owner in G"));
            }
        }
    }
    Ok(())
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Debug)]
struct OpenEntry {
    f: CostVec,
    g: CostVec,
    id: StateId,
}

/// Priority queue of states keyed by the lexicographic order of their
/// f-vectors, with ties broken by lexicographic g and then by state id
/// (older first). Entries are invalidated lazily: deletion elsewhere leaves
/// stale ids in the heap, and `pop_where` discards them.
#[derive(Clone, Debug, Default)]
pub struct OpenList {
    heap: BinaryHeap<Reverse<OpenEntry>>,
}

impl OpenList {
    pub fn new() -> OpenList {
        OpenList::default()
    }

    pub fn push(&mut self, f: CostVec, g: CostVec, id: StateId) {
        self.heap.push(Reverse(OpenEntry { f, g, id }));
    }

    /// Pop the lexicographically minimal live entry, discarding stale ones.
    pub fn pop_where(&mut self, mut live: impl FnMut(StateId) -> bool) -> Option<StateId> {
        while let Some(Reverse(entry)) = self.heap.pop() {
            if live(entry.id) {
                return Some(entry.id);
            }
        }
        None
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    /// Drain every queued id (stale ones included), e.g. for re-keying after
    /// the heuristic target moved.
    pub fn drain_ids(&mut self) -> Vec<StateId> {
        std::mem::take(&mut self.heap)
            .into_iter()
            .map(|Reverse(e)| e.id)
            .collect()
    }

    pub fn ids(&self) -> impl Iterator<Item = StateId> + '_ {
        self.heap.iter().map(|Reverse(e)| e.id)
    }

    /// Queued (f, id) keys in ascending order, for snapshot dumps.
    pub fn sorted_keys(&self) -> Vec<(CostVec, StateId)> {
        let mut keys: Vec<(CostVec, StateId)> = self
            .heap
            .iter()
            .map(|Reverse(e)| (e.f.clone(), e.id))
            .collect();
        keys.sort();
        keys
    }
}

/// States filtered by the current solutions, reserved for the next planning
/// task. A plain unordered set: members re-enter the open list wholesale at
/// task end and are re-validated on pop.
#[derive(Clone, Debug, Default)]
pub struct ReserveQueue {
    states: Vec<StateId>,
}

impl ReserveQueue {
    pub fn new() -> ReserveQueue {
        ReserveQueue::default()
    }

    pub fn push(&mut self, id: StateId) {
        self.states.push(id);
    }

    pub fn drain(&mut self) -> Vec<StateId> {
        std::mem::take(&mut self.states)
    }

    pub fn ids(&self) -> &[StateId] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cv(components: &[u64]) -> CostVec {
        CostVec::from_finite(components)
    }

    #[test]
    fn open_list_pops_lex_min() {
        let mut arena = StateArena::new();
        let a = arena.alloc(0, cv(&[3, 1]));
        let b = arena.alloc(1, cv(&[2, 9]));
        let mut open = OpenList::new();
        open.push(cv(&[3, 1]), cv(&[3, 1]), a);
        open.push(cv(&[2, 9]), cv(&[2, 9]), b);
        assert_eq!(open.pop_where(|_| true), Some(b));
        assert_eq!(open.pop_where(|_| true), Some(a));
        assert_eq!(open.pop_where(|_| true), None);
    }

    #[test]
    fn open_list_skips_stale_entries() {
        let mut arena = StateArena::new();
        let mut store = LabelStore::new(2);
        let a = arena.alloc(0, cv(&[1, 1]));
        store.g_insert(0, cv(&[1, 1]), a);
        let b = arena.alloc(1, cv(&[2, 2]));
        store.g_insert(1, cv(&[2, 2]), b);

        let mut open = OpenList::new();
        open.push(cv(&[1, 1]), cv(&[1, 1]), a);
        open.push(cv(&[2, 2]), cv(&[2, 2]), b);

        // Deleting a's label makes its entry stale; pop returns b.
        store.g_remove_if_owner(0, &cv(&[1, 1]), a);
        arena.free(a);
        let popped = open.pop_where(|id| {
            arena
                .get(id)
                .is_some_and(|s| store.g_owner(s.node, &s.g) == Some(id))
        });
        assert_eq!(popped, Some(b));
    }

    #[test]
    fn equal_f_ties_break_by_g_then_id() {
        let mut arena = StateArena::new();
        let a = arena.alloc(0, cv(&[4, 4]));
        let b = arena.alloc(1, cv(&[3, 5]));
        let c = arena.alloc(2, cv(&[3, 5]));
        let mut open = OpenList::new();
        open.push(cv(&[5, 5]), cv(&[4, 4]), a);
        open.push(cv(&[5, 5]), cv(&[3, 5]), c);
        open.push(cv(&[5, 5]), cv(&[3, 5]), b);
        assert_eq!(open.pop_where(|_| true), Some(b)); // lex g, then older id
        assert_eq!(open.pop_where(|_| true), Some(c));
        assert_eq!(open.pop_where(|_| true), Some(a));
    }

    #[test]
    fn tree_links() {
        let mut arena = StateArena::new();
        let a = arena.alloc(0, cv(&[0, 0]));
        let b = arena.alloc(1, cv(&[1, 1]));
        arena.link(a, b);
        assert_eq!(arena.get(a).unwrap().children, vec![b]);
        assert_eq!(arena.get(b).unwrap().parent, Some(a));
        arena.unlink(b);
        assert!(arena.get(a).unwrap().children.is_empty());
        assert_eq!(arena.get(b).unwrap().parent, None);
    }

    #[test]
    fn parent_chain_depth() {
        let mut arena = StateArena::new();
        let root = arena.alloc(0, cv(&[0, 0]));
        let mut prev = root;
        for i in 1..=5 {
            let s = arena.alloc(i, cv(&[i as u64, i as u64]));
            arena.link(prev, s);
            prev = s;
        }
        assert_eq!(arena.depth(prev), 5);
        assert_eq!(arena.depth(root), 0);
    }

    #[test]
    #[should_panic(expected = "cannot link a state to itself")]
    fn self_link_panics() {
        let mut arena = StateArena::new();
        let a = arena.alloc(0, cv(&[0, 0]));
        arena.link(a, a);
    }

    #[test]
    fn ownership_guard() {
        let mut store = LabelStore::new(1);
        let mut arena = StateArena::new();
        let old = arena.alloc(0, cv(&[2, 2]));
        store.g_insert(0, cv(&[2, 2]), old);
        store.g_remove_if_owner(0, &cv(&[2, 2]), old);
        let newer = arena.alloc(0, cv(&[2, 2]));
        store.g_insert(0, cv(&[2, 2]), newer);
        // The dead state must not be able to evict the newer owner.
        assert!(!store.g_remove_if_owner(0, &cv(&[2, 2]), old));
        assert_eq!(store.g_owner(0, &cv(&[2, 2])), Some(newer));
    }

    #[test]
    fn bijection_audit_catches_orphans() {
        let mut store = LabelStore::new(1);
        let mut arena = StateArena::new();
        let a = arena.alloc(0, cv(&[1, 1]));
        store.g_insert(0, cv(&[1, 1]), a);
        assert!(audit_bijection(&arena, &store).is_ok());
        arena.free(a);
        assert!(audit_bijection(&arena, &store).is_err());
    }
}

//! Dynamic undirected graphs with per-edge cost vectors.
//!
//! Grids come in through the MovingAI `.map` text format and become
//! four-connected graphs over cell ids (`row * width + col`). Edge costs can
//! be mutated afterwards (obstacle insertion makes every incident edge
//! infinite, obstacle removal re-rolls fresh finite vectors) and every
//! mutation is reported as an [`EdgeChange`] for the planners to ingest.

use crate::costvec::{Cost, CostVec};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

pub type NodeId = u32;

/// Canonical undirected edge key: endpoints in ascending order.
fn edge_key(u: NodeId, w: NodeId) -> (NodeId, NodeId) {
    if u <= w {
        (u, w)
    } else {
        (w, u)
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MapParseError {
    #[error("line {line}: expected `{expected}`")]
    MissingHeader { line: usize, expected: &'static str },
    #[error("line {line}: malformed header field `{field}`")]
    BadHeaderField { line: usize, field: &'static str },
    #[error("line {line}: row has {got} cells, expected {expected}")]
    RaggedRow {
        line: usize,
        got: usize,
        expected: usize,
    },
    #[error("line {line}: unknown cell glyph {glyph:?}")]
    UnknownGlyph { line: usize, glyph: char },
    #[error("line {line}: expected {expected} map rows, found {got}")]
    MissingRows {
        line: usize,
        expected: usize,
        got: usize,
    },
}

/// A rectangular four-connected grid with a passability mask.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridMap {
    width: usize,
    height: usize,
    passable: Vec<bool>,
}

impl GridMap {
    /// Parse MovingAI `.map` text: `type`, `height H`, `width W`, `map`
    /// headers followed by `H` rows of `W` glyphs. `.` and `G` are passable;
    /// `@`, `O`, `T` and `W` are blocked; anything else is an error.
    pub fn parse(text: &str) -> Result<GridMap, MapParseError> {
        let mut lines = text.lines().enumerate();
        let mut next_line = |expected: &'static str| {
            lines
                .next()
                .map(|(i, l)| (i + 1, l.trim_end()))
                .ok_or(MapParseError::MissingHeader { line: 0, expected })
        };

        let (line, l) = next_line("type")?;
        if !l.starts_with("type") {
            return Err(MapParseError::MissingHeader {
                line,
                expected: "type",
            });
        }

        let mut height: Option<usize> = None;
        let mut width: Option<usize> = None;
        for _ in 0..2 {
            let (line, l) = next_line("height/width")?;
            let mut parts = l.split_whitespace();
            match (parts.next(), parts.next()) {
                (Some("height"), Some(v)) => {
                    height = Some(v.parse().map_err(|_| MapParseError::BadHeaderField {
                        line,
                        field: "height",
                    })?)
                }
                (Some("width"), Some(v)) => {
                    width = Some(v.parse().map_err(|_| MapParseError::BadHeaderField {
                        line,
                        field: "width",
                    })?)
                }
                _ => {
                    return Err(MapParseError::MissingHeader {
                        line,
                        expected: "height/width",
                    })
                }
            }
        }
        let (height, width) = (height.unwrap_or(0), width.unwrap_or(0));
        if height == 0 {
            return Err(MapParseError::BadHeaderField {
                line: 2,
                field: "height",
            });
        }
        if width == 0 {
            return Err(MapParseError::BadHeaderField {
                line: 3,
                field: "width",
            });
        }

        let (line, l) = next_line("map")?;
        if l != "map" {
            return Err(MapParseError::MissingHeader {
                line,
                expected: "map",
            });
        }

        let mut passable = Vec::with_capacity(width * height);
        let mut rows = 0usize;
        let mut last_line = line;
        for (i, l) in lines {
            let line = i + 1;
            let l = l.trim_end();
            if rows == height {
                if l.is_empty() {
                    continue;
                }
                return Err(MapParseError::MissingRows {
                    line,
                    expected: height,
                    got: rows + 1,
                });
            }
            let cells: Vec<char> = l.chars().collect();
            if cells.len() != width {
                return Err(MapParseError::RaggedRow {
                    line,
                    got: cells.len(),
                    expected: width,
                });
            }
            for glyph in cells {
                match glyph {
                    '.' | 'G' => passable.push(true),
                    '@' | 'O' | 'T' | 'W' => passable.push(false),
                    _ => return Err(MapParseError::UnknownGlyph { line, glyph }),
                }
            }
            rows += 1;
            last_line = line;
        }
        if rows != height {
            return Err(MapParseError::MissingRows {
                line: last_line,
                expected: height,
                got: rows,
            });
        }

        Ok(GridMap {
            width,
            height,
            passable,
        })
    }

    /// All-passable grid, useful for synthetic instances.
    pub fn empty(width: usize, height: usize) -> GridMap {
        GridMap {
            width,
            height,
            passable: vec![true; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn node(&self, row: usize, col: usize) -> NodeId {
        debug_assert!(row < self.height && col < self.width);
        (row * self.width + col) as NodeId
    }

    pub fn coords(&self, node: NodeId) -> (usize, usize) {
        let n = node as usize;
        (n / self.width, n % self.width)
    }

    pub fn is_passable(&self, node: NodeId) -> bool {
        self.passable.get(node as usize).copied().unwrap_or(false)
    }

    /// Passable cell ids in ascending order.
    pub fn passable_nodes(&self) -> Vec<NodeId> {
        (0..self.passable.len() as NodeId)
            .filter(|&n| self.passable[n as usize])
            .collect()
    }

    /// Undirected edges between orthogonally adjacent passable cells, in
    /// row-major (right edge, then down edge) order.
    pub fn edges(&self) -> Vec<(NodeId, NodeId)> {
        let mut out = Vec::new();
        for row in 0..self.height {
            for col in 0..self.width {
                let u = self.node(row, col);
                if !self.passable[u as usize] {
                    continue;
                }
                if col + 1 < self.width {
                    let w = self.node(row, col + 1);
                    if self.passable[w as usize] {
                        out.push((u, w));
                    }
                }
                if row + 1 < self.height {
                    let w = self.node(row + 1, col);
                    if self.passable[w as usize] {
                        out.push((u, w));
                    }
                }
            }
        }
        out
    }
}

/// One edge-cost mutation, fed to the planners' edge-change ingestion.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EdgeChange {
    pub u: NodeId,
    pub w: NodeId,
    pub new_cost: CostVec,
}

/// Undirected graph with a mutable cost vector per edge.
///
/// Obstacle nodes stay in the node set; only their incident edges become
/// infinite, which keeps node ids stable across planning tasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynGraph {
    m: usize,
    adj: Vec<Vec<NodeId>>,
    costs: BTreeMap<(NodeId, NodeId), CostVec>,
}

impl DynGraph {
    pub fn new(num_nodes: usize, m: usize) -> DynGraph {
        assert!(m >= 1, "objective count must be >= 1");
        DynGraph {
            m,
            adj: vec![Vec::new(); num_nodes],
            costs: BTreeMap::new(),
        }
    }

    /// Build a graph from a grid, assigning every edge an independent integer
    /// vector with components uniform in `[lo, hi]`. One draw per undirected
    /// edge, in the deterministic order of [`GridMap::edges`].
    pub fn assign_random_costs(grid: &GridMap, m: usize, lo: u64, hi: u64, seed: u64) -> DynGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::assign_random_costs_with(grid, m, lo, hi, &mut rng)
    }

    /// Same as [`assign_random_costs`](Self::assign_random_costs) but drawing
    /// from a caller-owned stream.
    pub fn assign_random_costs_with(
        grid: &GridMap,
        m: usize,
        lo: u64,
        hi: u64,
        rng: &mut impl Rng,
    ) -> DynGraph {
        assert!(1 <= lo && lo <= hi, "cost range must satisfy 1 <= lo <= hi");
        let mut g = DynGraph::new(grid.width * grid.height, m);
        for (u, w) in grid.edges() {
            g.add_edge(u, w, random_cost(m, lo, hi, rng));
        }
        g
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn num_nodes(&self) -> usize {
        self.adj.len()
    }

    pub fn add_edge(&mut self, u: NodeId, w: NodeId, cost: CostVec) {
        assert_ne!(u, w, "self loops are not allowed");
        assert_eq!(cost.m(), self.m, "objective count mismatch");
        let key = edge_key(u, w);
        if self.costs.insert(key, cost).is_none() {
            let pos = self.adj[u as usize].binary_search(&w).unwrap_err();
            self.adj[u as usize].insert(pos, w);
            let pos = self.adj[w as usize].binary_search(&u).unwrap_err();
            self.adj[w as usize].insert(pos, u);
        }
    }

    /// Neighbors of `u` in ascending id order.
    pub fn neighbors(&self, u: NodeId) -> &[NodeId] {
        &self.adj[u as usize]
    }

    /// Symmetric cost lookup; `None` when `(u, w)` is not an edge.
    pub fn cost(&self, u: NodeId, w: NodeId) -> Option<&CostVec> {
        self.costs.get(&edge_key(u, w))
    }

    pub fn is_edge(&self, u: NodeId, w: NodeId) -> bool {
        self.costs.contains_key(&edge_key(u, w))
    }

    /// All edges with their costs, in canonical key order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, &CostVec)> {
        self.costs.iter().map(|(&(u, w), c)| (u, w, c))
    }

    /// Overwrite one edge cost. Returns `None` when the new cost equals the
    /// current one: no-op changes are dropped before reaching planners.
    pub fn set_edge_cost(&mut self, u: NodeId, w: NodeId, new_cost: CostVec) -> Option<EdgeChange> {
        assert_eq!(new_cost.m(), self.m, "objective count mismatch");
        let key = edge_key(u, w);
        let slot = self
            .costs
            .get_mut(&key)
            .unwrap_or_else(|| panic!("({u},{w}) is not an edge"));
        if *slot == new_cost {
            return None;
        }
        *slot = new_cost.clone();
        Some(EdgeChange {
            u: key.0,
            w: key.1,
            new_cost,
        })
    }

    /// Make every edge incident on `node` infinite. Returns the applied
    /// changes; re-adding an obstacle yields an empty list.
    pub fn add_obstacle(&mut self, node: NodeId) -> Vec<EdgeChange> {
        let inf = CostVec::inf(self.m);
        let neighbors: Vec<NodeId> = self.adj[node as usize].clone();
        neighbors
            .into_iter()
            .filter_map(|w| self.set_edge_cost(node, w, inf.clone()))
            .collect()
    }

    /// Assign every edge incident on `node` a fresh finite random vector with
    /// components uniform in `[lo, hi]`.
    pub fn remove_obstacle(
        &mut self,
        node: NodeId,
        lo: u64,
        hi: u64,
        rng: &mut impl Rng,
    ) -> Vec<EdgeChange> {
        assert!(1 <= lo && lo <= hi, "cost range must satisfy 1 <= lo <= hi");
        let neighbors: Vec<NodeId> = self.adj[node as usize].clone();
        neighbors
            .into_iter()
            .filter_map(|w| {
                let cost = random_cost(self.m, lo, hi, rng);
                self.set_edge_cost(node, w, cost)
            })
            .collect()
    }

    /// JSON dump: `{M, nodes, edges: [{u, w, cost: [...]}]}` with `"inf"` as
    /// the infinity literal.
    pub fn to_json(&self) -> serde_json::Value {
        let edges: Vec<serde_json::Value> = self
            .edges()
            .map(|(u, w, c)| serde_json::json!({ "u": u, "w": w, "cost": c }))
            .collect();
        serde_json::json!({
            "M": self.m,
            "nodes": self.num_nodes(),
            "edges": edges,
        })
    }
}

fn random_cost(m: usize, lo: u64, hi: u64, rng: &mut impl Rng) -> CostVec {
    CostVec::new((0..m).map(|_| Cost::Finite(rng.random_range(lo..=hi))))
}

/// Admissible cost-to-go estimate used by all planners.
pub trait Heuristic {
    fn estimate(&self, from: NodeId, to: NodeId) -> CostVec;
}

/// Unit vector scaled by the Manhattan distance between the two cells.
///
/// Admissible whenever every finite edge component is at least 1, which the
/// random cost assignment guarantees.
#[derive(Clone, Copy, Debug)]
pub struct ManhattanHeuristic {
    pub width: usize,
    pub m: usize,
}

impl Heuristic for ManhattanHeuristic {
    fn estimate(&self, from: NodeId, to: NodeId) -> CostVec {
        let (fr, fc) = (from as usize / self.width, from as usize % self.width);
        let (tr, tc) = (to as usize / self.width, to as usize % self.width);
        let dist = fr.abs_diff(tr) + fc.abs_diff(tc);
        CostVec::uniform(self.m, dist as u64)
    }
}

/// Zero estimate, for graphs without grid structure.
#[derive(Clone, Copy, Debug)]
pub struct ZeroHeuristic {
    pub m: usize,
}

impl Heuristic for ZeroHeuristic {
    fn estimate(&self, _from: NodeId, _to: NodeId) -> CostVec {
        CostVec::zeros(self.m)
    }
}

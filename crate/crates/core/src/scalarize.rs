//! Why weighted-sum scalarization is not enough: a built-in bi-objective
//! instance whose Pareto front contains a point that no linear weight sweep
//! can return, while the exact planner finds all of it.

use crate::costvec::{Cost, CostVec};
use crate::graph::{DynGraph, NodeId, ZeroHeuristic};
use crate::namoa::NamoaPlanner;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

/// Outcome of solving the scalarized problem for one weight.
#[derive(Clone, Debug)]
pub struct WeightResult {
    pub weight: f64,
    /// Scalarized cost of every exact-front vector under this weight.
    pub front_scalar_costs: Vec<(CostVec, f64)>,
    /// Cost vector of the path the single-objective solver returns.
    pub returned: CostVec,
}

#[derive(Clone, Debug)]
pub struct ScalarizationReport {
    pub front: Vec<CostVec>,
    pub sweep: Vec<WeightResult>,
    /// Front members returned by no weight in the sweep.
    pub never_returned: Vec<CostVec>,
}

/// Three parallel routes from node 0 to node 4 with route costs
/// [2,6], [4,4] and [6,2]: the middle one sits strictly inside the segment
/// spanned by the other two, so its weighted sum is never the unique minimum.
pub fn demo_graph() -> (DynGraph, NodeId, NodeId) {
    let mut g = DynGraph::new(5, 2);
    g.add_edge(0, 1, CostVec::from_finite(&[1, 3]));
    g.add_edge(1, 4, CostVec::from_finite(&[1, 3]));
    g.add_edge(0, 2, CostVec::from_finite(&[2, 2]));
    g.add_edge(2, 4, CostVec::from_finite(&[2, 2]));
    g.add_edge(0, 3, CostVec::from_finite(&[3, 1]));
    g.add_edge(3, 4, CostVec::from_finite(&[3, 1]));
    (g, 0, 4)
}

fn scalar(cost: &CostVec, weight: f64) -> f64 {
    let c = cost.components();
    let finite = |c: &Cost| match c {
        Cost::Finite(v) => *v as f64,
        Cost::Inf => f64::INFINITY,
    };
    weight * finite(&c[0]) + (1.0 - weight) * finite(&c[1])
}

/// Single-objective Dijkstra on the weighted edge costs. Ties break towards
/// lower node ids, deterministically.
pub fn scalarized_shortest_path(
    graph: &DynGraph,
    from: NodeId,
    to: NodeId,
    weight: f64,
) -> Option<Vec<NodeId>> {
    let n = graph.num_nodes();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev: Vec<Option<NodeId>> = vec![None; n];
    let mut heap: BinaryHeap<Reverse<(u64, NodeId)>> = BinaryHeap::new();
    // f64 keys ordered through their bit pattern; all costs are >= 0.
    let key = |d: f64| d.to_bits();
    dist[from as usize] = 0.0;
    heap.push(Reverse((key(0.0), from)));
    while let Some(Reverse((k, u))) = heap.pop() {
        if k > key(dist[u as usize]) {
            continue;
        }
        if u == to {
            break;
        }
        for &w in graph.neighbors(u) {
            let c = graph.cost(u, w).expect("adjacency without cost");
            let d = dist[u as usize] + scalar(c, weight);
            if d < dist[w as usize] {
                dist[w as usize] = d;
                prev[w as usize] = Some(u);
                heap.push(Reverse((key(d), w)));
            }
        }
    }
    if dist[to as usize].is_infinite() {
        return None;
    }
    let mut path = vec![to];
    let mut cur = to;
    while let Some(p) = prev[cur as usize] {
        path.push(p);
        cur = p;
    }
    path.reverse();
    (path[0] == from).then_some(path)
}

fn path_cost(graph: &DynGraph, path: &[NodeId]) -> CostVec {
    let mut acc = CostVec::zeros(graph.m());
    for pair in path.windows(2) {
        acc = &acc + graph.cost(pair[0], pair[1]).expect("path edge");
    }
    acc
}

/// Sweep w over {0.0, 0.1, ..., 1.0} on the built-in instance and report
/// which exact-front vectors the scalarized solver can and cannot reach.
pub fn run_demo() -> ScalarizationReport {
    let (graph, start, dest) = demo_graph();
    let mut exact = NamoaPlanner::new(dest, start, Box::new(ZeroHeuristic { m: 2 }), 0.0);
    let front = exact.solve(&graph, None).expect("no deadline set").front;

    let mut sweep = Vec::new();
    for step in 0..=10u32 {
        let weight = f64::from(step) / 10.0;
        let path =
            scalarized_shortest_path(&graph, start, dest, weight).expect("demo graph is connected");
        let returned = path_cost(&graph, &path);
        let front_scalar_costs = front
            .iter()
            .map(|c| (c.clone(), scalar(c, weight)))
            .collect();
        sweep.push(WeightResult {
            weight,
            front_scalar_costs,
            returned,
        });
    }

    let never_returned = front
        .iter()
        .filter(|c| sweep.iter().all(|w| &w.returned != *c))
        .cloned()
        .collect();

    ScalarizationReport {
        front,
        sweep,
        never_returned,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_planner_finds_all_three_points() {
        let report = run_demo();
        assert_eq!(
            report.front,
            vec![
                CostVec::from_finite(&[2, 6]),
                CostVec::from_finite(&[4, 4]),
                CostVec::from_finite(&[6, 2]),
            ]
        );
    }

    #[test]
    fn interior_point_is_never_returned() {
        let report = run_demo();
        assert!(report
            .never_returned
            .contains(&CostVec::from_finite(&[4, 4])));
        // The weighted sum of [4,4] is always 4; one hull route is always at
        // or below it: min(6-4w, 2+4w) <= 4 for every w.
        for w in &report.sweep {
            let interior = w
                .front_scalar_costs
                .iter()
                .find(|(c, _)| c == &CostVec::from_finite(&[4, 4]))
                .map(|(_, s)| *s)
                .unwrap();
            let best_hull = w
                .front_scalar_costs
                .iter()
                .filter(|(c, _)| c != &CostVec::from_finite(&[4, 4]))
                .map(|(_, s)| *s)
                .fold(f64::INFINITY, f64::min);
            assert!(best_hull <= interior + 1e-9);
        }
    }

    #[test]
    fn weight_zero_returns_second_objective_optimum() {
        let report = run_demo();
        assert_eq!(report.sweep[0].weight, 0.0);
        assert_eq!(report.sweep[0].returned, CostVec::from_finite(&[6, 2]));
        // And w=1.0 the first-objective optimum.
        assert_eq!(report.sweep[10].returned, CostVec::from_finite(&[2, 6]));
    }
}

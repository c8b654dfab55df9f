//! Dynamic-replanning harness: a robot follows one Pareto-optimal path while
//! the environment mutates, and every mutation triggers a replanning task.
//!
//! Two protocols:
//!
//! * ahead-obstacle — after every `k` moves an obstacle appears on the next
//!   node ahead of the robot along its selected path;
//! * multi-obstacle — after every `k` moves, alternately add or delete two
//!   random obstacle nodes inside the 5x5 window centered on the robot.
//!
//! Scenario randomness (start/destination sampling, path selection, obstacle
//! picks) and cost randomness (edge vectors) come from two independent
//! streams of one master seed, so the event sequence cannot be perturbed by
//! planner internals. Several planners can ride the same event stream: the
//! first one drives the robot, the rest replan as shadows for task-by-task
//! comparison.

use crate::costvec::NdKernel;
use crate::graph::{DynGraph, GridMap, ManhattanHeuristic, NodeId};
use crate::modstar::ModStarPlanner;
use crate::mopbd::{PlannerConfig, Session};
use crate::namoa::NamoaPlanner;
use crate::planner::{Plan, Planner};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::io;
use std::time::{Duration, Instant};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Protocol {
    AheadObstacle,
    MultiObstacle,
}

#[derive(Clone, Debug)]
pub struct SimConfig {
    pub m: usize,
    /// Inclusive integer range for random edge-cost components.
    pub cost_lo: u64,
    pub cost_hi: u64,
    /// Robot moves between environment events (`k`).
    pub moves_per_event: usize,
    /// Per planning task; `None` disables the cooperative deadline.
    pub task_time_limit: Option<Duration>,
    pub seed: u64,
    pub protocol: Protocol,
}

impl SimConfig {
    /// Ahead-obstacle defaults: costs in [1,10], k = 7, one minute per task.
    pub fn ahead(m: usize, seed: u64) -> SimConfig {
        SimConfig {
            m,
            cost_lo: 1,
            cost_hi: 10,
            moves_per_event: 7,
            task_time_limit: Some(Duration::from_secs(60)),
            seed,
            protocol: Protocol::AheadObstacle,
        }
    }

    /// Multi-obstacle defaults: costs in [1,5], k = 7, five minutes per task.
    pub fn multi(m: usize, seed: u64) -> SimConfig {
        SimConfig {
            m,
            cost_lo: 1,
            cost_hi: 5,
            moves_per_event: 7,
            task_time_limit: Some(Duration::from_secs(300)),
            seed,
            protocol: Protocol::MultiObstacle,
        }
    }
}

/// Which planner to run; `parse` accepts the CLI names.
#[derive(Clone, Copy, PartialEq, Debug)]
pub enum PlannerSpec {
    Mopbd { eps: f64, kernel: NdKernel },
    Namoa { eps: f64 },
    ModStar,
}

impl PlannerSpec {
    /// `mopbd`, `mopbd-i`, `mopbd-eps`, `namoa`, `namoa-eps`, `mod`.
    /// `eps` only applies to the `-eps` variants.
    pub fn parse(name: &str, eps: f64) -> Option<PlannerSpec> {
        match name {
            "mopbd" => Some(PlannerSpec::Mopbd {
                eps: 0.0,
                kernel: NdKernel::Naive,
            }),
            "mopbd-i" => Some(PlannerSpec::Mopbd {
                eps: 0.0,
                kernel: NdKernel::Kung2d,
            }),
            "mopbd-eps" => Some(PlannerSpec::Mopbd {
                eps,
                kernel: NdKernel::Naive,
            }),
            "namoa" => Some(PlannerSpec::Namoa { eps: 0.0 }),
            "namoa-eps" => Some(PlannerSpec::Namoa { eps }),
            "mod" => Some(PlannerSpec::ModStar),
            _ => None,
        }
    }

    pub fn eps(&self) -> f64 {
        match self {
            PlannerSpec::Mopbd { eps, .. } | PlannerSpec::Namoa { eps } => *eps,
            PlannerSpec::ModStar => 0.0,
        }
    }

    pub fn build(
        &self,
        graph: &DynGraph,
        grid: &GridMap,
        u_d: NodeId,
        u_c: NodeId,
    ) -> Box<dyn Planner> {
        let h = ManhattanHeuristic {
            width: grid.width(),
            m: graph.m(),
        };
        match *self {
            PlannerSpec::Mopbd { eps, kernel } => Box::new(Session::new(
                graph,
                u_d,
                u_c,
                Box::new(h),
                PlannerConfig {
                    eps,
                    nd_kernel: kernel,
                },
            )),
            PlannerSpec::Namoa { eps } => Box::new(NamoaPlanner::new(u_d, u_c, Box::new(h), eps)),
            PlannerSpec::ModStar => Box::new(ModStarPlanner::new(graph, u_d, u_c, Box::new(h))),
        }
    }
}

/// Metrics of one planning task, one planner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaskRecord {
    pub instance: u64,
    pub task: usize,
    pub planner: String,
    pub eps: f64,
    pub expansions: u64,
    pub runtime_s: f64,
    pub solutions: usize,
    /// Average Pareto-path length l_k (moves), when solutions exist.
    pub avg_path_len: Option<f64>,
    /// l_k / l_0 against this planner's initial task.
    pub lk_over_l0: Option<f64>,
    pub event: String,
    pub timed_out: bool,
}

/// The CSV summary row: a fixed column subset of [`TaskRecord`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub instance: u64,
    pub task: usize,
    pub planner: String,
    pub eps: f64,
    pub expansions: u64,
    pub runtime_s: f64,
    pub solutions: usize,
    pub lk_over_l0: Option<f64>,
    pub event: String,
}

impl From<&TaskRecord> for SummaryRow {
    fn from(r: &TaskRecord) -> SummaryRow {
        SummaryRow {
            instance: r.instance,
            task: r.task,
            planner: r.planner.clone(),
            eps: r.eps,
            expansions: r.expansions,
            runtime_s: r.runtime_s,
            solutions: r.solutions,
            lk_over_l0: r.lk_over_l0,
            event: r.event.clone(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct PlannerTrace {
    pub planner: String,
    pub records: Vec<TaskRecord>,
}

#[derive(Clone, Debug)]
pub struct SimOutcome {
    pub planners: Vec<PlannerTrace>,
    pub arrived: bool,
    /// Some planner exceeded its task deadline and the instance was aborted.
    pub timed_out: bool,
}

/// Everything a per-task observer gets to see.
pub struct TaskContext<'a> {
    pub task: usize,
    pub graph: &'a DynGraph,
    pub u_d: NodeId,
    pub u_c: NodeId,
    pub event: &'a str,
    /// One `(name, plan)` pair per planner, driver first.
    pub plans: &'a [(String, Plan)],
}

/// Run one seeded instance with a single planner.
pub fn run_instance(grid: &GridMap, config: &SimConfig, spec: PlannerSpec) -> SimOutcome {
    run_simulation(grid, config, &[spec], |_| {})
}

/// Run one seeded instance with several planners on the identical event
/// stream; `specs[0]` drives the robot and the others shadow it.
pub fn run_simulation(
    grid: &GridMap,
    config: &SimConfig,
    specs: &[PlannerSpec],
    mut on_task: impl FnMut(&TaskContext),
) -> SimOutcome {
    assert!(!specs.is_empty(), "need at least one planner");
    assert!(config.moves_per_event >= 1, "k must be >= 1");

    let mut env_rng = ChaCha8Rng::seed_from_u64(config.seed);
    env_rng.set_stream(0);
    let mut cost_rng = ChaCha8Rng::seed_from_u64(config.seed);
    cost_rng.set_stream(1);

    let mut graph = DynGraph::assign_random_costs_with(
        grid,
        config.m,
        config.cost_lo,
        config.cost_hi,
        &mut cost_rng,
    );

    let cells = grid.passable_nodes();
    assert!(cells.len() >= 2, "map needs at least two passable cells");
    let u_o = cells[env_rng.random_range(0..cells.len())];
    let u_d = loop {
        let cand = cells[env_rng.random_range(0..cells.len())];
        if cand != u_o {
            break cand;
        }
    };

    let mut planners: Vec<Box<dyn Planner>> = specs
        .iter()
        .map(|s| s.build(&graph, grid, u_d, u_o))
        .collect();
    let mut traces: Vec<PlannerTrace> = planners
        .iter()
        .map(|p| PlannerTrace {
            planner: p.name().to_string(),
            records: Vec::new(),
        })
        .collect();
    let mut l0: Vec<Option<f64>> = vec![None; planners.len()];

    let mut u_c = u_o;
    let mut arrived = false;
    let mut timed_out = false;
    let mut task = 0usize;
    let mut event = String::from("initial");
    // The path the robot follows, `followed[cursor] == u_c`.
    let mut followed: Vec<NodeId> = Vec::new();
    let mut cursor = 0usize;

    'instance: loop {
        // One planning task for every planner on the current graph.
        let mut plans: Vec<(String, Plan)> = Vec::new();
        for (i, planner) in planners.iter_mut().enumerate() {
            let started = Instant::now();
            let deadline = config.task_time_limit.map(|l| started + l);
            let outcome = planner.plan(&graph, deadline);
            let runtime_s = started.elapsed().as_secs_f64();
            match outcome {
                Ok(plan) => {
                    let lens: Vec<f64> = plan
                        .front
                        .iter()
                        .filter_map(|c| planner.front_path(&graph, c))
                        .map(|p| (p.len() - 1) as f64)
                        .collect();
                    let avg_path_len = if lens.is_empty() {
                        None
                    } else {
                        Some(lens.iter().sum::<f64>() / lens.len() as f64)
                    };
                    if task == 0 {
                        l0[i] = avg_path_len;
                    }
                    let lk_over_l0 = match (avg_path_len, l0[i]) {
                        (Some(lk), Some(l0)) if l0 > 0.0 => Some(lk / l0),
                        _ => None,
                    };
                    traces[i].records.push(TaskRecord {
                        instance: config.seed,
                        task,
                        planner: planner.name().to_string(),
                        eps: specs[i].eps(),
                        expansions: plan.expansions,
                        runtime_s,
                        solutions: plan.front.len(),
                        avg_path_len,
                        lk_over_l0,
                        event: event.clone(),
                        timed_out: false,
                    });
                    plans.push((planner.name().to_string(), plan));
                }
                Err(_) => {
                    traces[i].records.push(TaskRecord {
                        instance: config.seed,
                        task,
                        planner: planner.name().to_string(),
                        eps: specs[i].eps(),
                        expansions: 0,
                        runtime_s,
                        solutions: 0,
                        avg_path_len: None,
                        lk_over_l0: None,
                        event: event.clone(),
                        timed_out: true,
                    });
                    timed_out = true;
                    break 'instance;
                }
            }
        }
        on_task(&TaskContext {
            task,
            graph: &graph,
            u_d,
            u_c,
            event: &event,
            plans: &plans,
        });
        task += 1;

        let driver_plan = &plans[0].1;
        if driver_plan.front.is_empty() {
            break; // the environment eliminated all feasible solutions
        }

        // Select a path to follow: keep the current one if its remaining
        // suffix is still among the driver's Pareto paths, else draw
        // uniformly from the fresh set.
        let paths: Vec<Vec<NodeId>> = driver_plan
            .front
            .iter()
            .filter_map(|c| planners[0].front_path(&graph, c))
            .collect();
        if paths.is_empty() {
            break; // solutions exist but no path is extractable; degenerate
        }
        let keep = !followed.is_empty() && paths.iter().any(|p| p[..] == followed[cursor..]);
        if !keep {
            let pick = env_rng.random_range(0..paths.len());
            followed = paths[pick].clone();
            cursor = 0;
            debug_assert_eq!(followed[0], u_c);
        }

        // Follow the selected path until the next event or arrival.
        let mut moves = 0usize;
        loop {
            if u_c == u_d {
                arrived = true;
                break 'instance;
            }
            u_c = followed[cursor + 1];
            cursor += 1;
            moves += 1;
            for p in planners.iter_mut() {
                p.set_start(u_c);
            }
            if u_c == u_d {
                arrived = true;
                break 'instance;
            }
            if moves == config.moves_per_event {
                match make_event(
                    grid,
                    &mut graph,
                    config,
                    &mut env_rng,
                    &mut cost_rng,
                    u_c,
                    u_d,
                    &followed[cursor..],
                    task,
                ) {
                    Some((description, changes)) => {
                        for ch in &changes {
                            for p in planners.iter_mut() {
                                p.edge_updated(&graph, ch.u, ch.w);
                            }
                        }
                        event = description;
                        continue 'instance; // replan
                    }
                    None => {
                        // No event (the node ahead is the destination);
                        // keep moving.
                        moves = 0;
                    }
                }
            }
        }
    }

    SimOutcome {
        planners: traces,
        arrived,
        timed_out,
    }
}

/// Apply one environment event. Returns `None` when the protocol declines to
/// act (ahead-obstacle refuses to wall off the destination).
#[allow(clippy::too_many_arguments)]
fn make_event(
    grid: &GridMap,
    graph: &mut DynGraph,
    config: &SimConfig,
    env_rng: &mut ChaCha8Rng,
    cost_rng: &mut ChaCha8Rng,
    u_c: NodeId,
    u_d: NodeId,
    remaining_path: &[NodeId],
    task: usize,
) -> Option<(String, Vec<crate::graph::EdgeChange>)> {
    match config.protocol {
        Protocol::AheadObstacle => {
            let ahead = remaining_path[1];
            if ahead == u_d {
                return None;
            }
            let changes = graph.add_obstacle(ahead);
            Some((format!("add_obstacle@{ahead}"), changes))
        }
        Protocol::MultiObstacle => {
            // 5x5 window centered on the robot, clipped at the map bounds.
            let (row, col) = grid.coords(u_c);
            let mut eligible: Vec<NodeId> = Vec::new();
            for r in row.saturating_sub(2)..=(row + 2).min(grid.height() - 1) {
                for c in col.saturating_sub(2)..=(col + 2).min(grid.width() - 1) {
                    let node = grid.node(r, c);
                    if grid.is_passable(node) && node != u_c && node != u_d {
                        eligible.push(node);
                    }
                }
            }
            let mut picked = Vec::new();
            for _ in 0..2 {
                if eligible.is_empty() {
                    break;
                }
                let i = env_rng.random_range(0..eligible.len());
                picked.push(eligible.swap_remove(i));
            }
            // Events alternate: the first one (task 1) adds.
            let adding = task % 2 == 1;
            let mut changes = Vec::new();
            for &node in &picked {
                if adding {
                    changes.extend(graph.add_obstacle(node));
                } else {
                    changes.extend(graph.remove_obstacle(
                        node,
                        config.cost_lo,
                        config.cost_hi,
                        cost_rng,
                    ));
                }
            }
            let kind = if adding { "multi_add" } else { "multi_del" };
            Some((format!("{kind}@{picked:?}"), changes))
        }
    }
}

/// Average expansions, runtime and solution count over the subsequent
/// planning tasks (task index >= 1) of a batch of records.
pub fn summarize_subsequent(records: &[TaskRecord]) -> Option<(f64, f64, f64)> {
    let subsequent: Vec<&TaskRecord> = records
        .iter()
        .filter(|r| r.task >= 1 && !r.timed_out)
        .collect();
    if subsequent.is_empty() {
        return None;
    }
    let n = subsequent.len() as f64;
    Some((
        subsequent.iter().map(|r| r.expansions as f64).sum::<f64>() / n,
        subsequent.iter().map(|r| r.runtime_s).sum::<f64>() / n,
        subsequent.iter().map(|r| r.solutions as f64).sum::<f64>() / n,
    ))
}

/// One JSON record per planning task (JSON Lines).
pub fn write_trace_json(records: &[TaskRecord], mut w: impl io::Write) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

pub fn read_trace_json(r: impl io::BufRead) -> io::Result<Vec<TaskRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}

pub fn write_summary_csv(records: &[TaskRecord], w: impl io::Write) -> csv::Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in records {
        wtr.serialize(SummaryRow::from(r))?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_summary_csv(r: impl io::Read) -> csv::Result<Vec<SummaryRow>> {
    let mut rdr = csv::Reader::from_reader(r);
    rdr.deserialize().collect()
}

/// Scatter data: x = l_k/l_0, y = runtime, subsequent tasks only.
pub fn write_scatter_csv(records: &[TaskRecord], w: impl io::Write) -> csv::Result<()> {
    #[derive(Serialize)]
    struct ScatterRow<'a> {
        planner: &'a str,
        eps: f64,
        lk_over_l0: f64,
        runtime_s: f64,
    }
    let mut wtr = csv::Writer::from_writer(w);
    for r in records.iter().filter(|r| r.task >= 1 && !r.timed_out) {
        if let Some(x) = r.lk_over_l0 {
            wtr.serialize(ScatterRow {
                planner: &r.planner,
                eps: r.eps,
                lk_over_l0: x,
                runtime_s: r.runtime_s,
            })?;
        }
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corridor_shorter_than_k_is_a_single_task() {
        // 1x4 corridor: at most 3 moves, k = 7, so the robot arrives without
        // any event.
        let grid = GridMap::parse("type octile\nheight 1\nwidth 4\nmap\n....\n").unwrap();
        let config = SimConfig::ahead(2, 11);
        let out = run_instance(&grid, &config, PlannerSpec::parse("mopbd", 0.0).unwrap());
        assert!(out.arrived);
        assert_eq!(out.planners[0].records.len(), 1);
        assert_eq!(out.planners[0].records[0].event, "initial");
        assert_eq!(out.planners[0].records[0].lk_over_l0, Some(1.0));
    }

    #[test]
    fn ahead_obstacles_terminate_in_dead_ends() {
        // 1x16 corridor with k=2: the obstacle ahead cuts the only route, so
        // the second planning task must return an empty front.
        let grid = GridMap::parse(&format!(
            "type octile\nheight 1\nwidth 16\nmap\n{}\n",
            ".".repeat(16)
        ))
        .unwrap();
        let mut config = SimConfig::ahead(2, 3);
        config.moves_per_event = 2;
        let out = run_instance(&grid, &config, PlannerSpec::parse("mopbd", 0.0).unwrap());
        let records = &out.planners[0].records;
        if records.len() > 1 {
            assert!(!out.arrived);
            let last = records.last().unwrap();
            assert_eq!(last.solutions, 0);
            assert!(last.event.starts_with("add_obstacle@"));
        } else {
            // Start and destination closer than k moves.
            assert!(out.arrived);
        }
    }

    #[test]
    fn event_stream_is_planner_independent() {
        let grid = GridMap::empty(8, 8);
        for seed in 0..6 {
            let config = SimConfig::ahead(2, seed);
            let a = run_instance(&grid, &config, PlannerSpec::parse("mopbd", 0.0).unwrap());
            let b = run_instance(&grid, &config, PlannerSpec::parse("namoa", 0.0).unwrap());
            let ra = &a.planners[0].records;
            let rb = &b.planners[0].records;
            assert_eq!(ra.len(), rb.len(), "seed {seed}");
            for (x, y) in ra.iter().zip(rb) {
                assert_eq!(x.event, y.event, "seed {seed} task {}", x.task);
                assert_eq!(x.solutions, y.solutions, "seed {seed} task {}", x.task);
                assert_eq!(
                    x.avg_path_len, y.avg_path_len,
                    "seed {seed} task {}",
                    x.task
                );
            }
            assert_eq!(a.arrived, b.arrived);
        }
    }

    #[test]
    fn shadow_planners_agree_on_fronts() {
        let grid = GridMap::empty(8, 8);
        let specs = [
            PlannerSpec::parse("mopbd", 0.0).unwrap(),
            PlannerSpec::parse("namoa", 0.0).unwrap(),
            PlannerSpec::parse("mod", 0.0).unwrap(),
        ];
        for seed in 0..4 {
            let config = SimConfig::ahead(2, seed);
            run_simulation(&grid, &config, &specs, |ctx| {
                let reference = &ctx.plans[0].1.front;
                for (name, plan) in ctx.plans.iter().skip(1) {
                    assert_eq!(
                        &plan.front, reference,
                        "{name} seed {seed} task {}",
                        ctx.task
                    );
                }
            });
        }
    }

    #[test]
    fn multi_obstacle_alternates_and_respects_window() {
        let grid = GridMap::empty(10, 10);
        let mut config = SimConfig::multi(2, 17);
        config.moves_per_event = 1;
        let out = run_instance(&grid, &config, PlannerSpec::parse("mopbd", 0.0).unwrap());
        let kinds: Vec<&str> = out.planners[0]
            .records
            .iter()
            .skip(1)
            .map(|r| {
                if r.event.starts_with("multi_add") {
                    "add"
                } else {
                    "del"
                }
            })
            .collect();
        for (i, kind) in kinds.iter().enumerate() {
            let expected = if i % 2 == 0 { "add" } else { "del" };
            assert_eq!(*kind, expected, "event {i}");
        }
    }

    #[test]
    fn trace_round_trips() {
        let grid = GridMap::empty(6, 6);
        let config = SimConfig::ahead(2, 23);
        let out = run_instance(&grid, &config, PlannerSpec::parse("mopbd", 0.0).unwrap());
        let records = &out.planners[0].records;

        let mut json = Vec::new();
        write_trace_json(records, &mut json).unwrap();
        let back = read_trace_json(io::BufReader::new(&json[..])).unwrap();
        assert_eq!(&back, records);

        let mut csv_buf = Vec::new();
        write_summary_csv(records, &mut csv_buf).unwrap();
        let rows = read_summary_csv(&csv_buf[..]).unwrap();
        let expected: Vec<SummaryRow> = records.iter().map(SummaryRow::from).collect();
        assert_eq!(rows, expected);
    }

    #[test]
    fn same_seed_reproduces_identical_traces() {
        let grid = GridMap::empty(8, 8);
        let config = SimConfig::multi(2, 5);
        let spec = PlannerSpec::parse("mopbd", 0.0).unwrap();
        let a = run_instance(&grid, &config, spec);
        let b = run_instance(&grid, &config, spec);
        let strip = |o: &SimOutcome| -> Vec<(usize, String, u64, usize)> {
            o.planners[0]
                .records
                .iter()
                .map(|r| (r.task, r.event.clone(), r.expansions, r.solutions))
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
    }
}

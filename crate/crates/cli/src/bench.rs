use crate::util::{format_ext, load_map, parse_planners, resolve_out, sim_config, write_records};
use crate::{BenchArgs, Failure};
use mopbd::simulator::{run_simulation, summarize_subsequent, SimOutcome, TaskRecord};
use std::sync::atomic::{AtomicU64, Ordering};

pub fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let grid = load_map(&args.map)?;
    let specs = parse_planners(&args.planner, args.eps)?;
    if args.jobs < 1 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }

    let base_config = sim_config(
        args.objectives,
        args.seed,
        args.k,
        args.protocol,
        args.time_limit,
    )?;

    // One shadowed simulation per seed: all planners ride the same events.
    let seeds: Vec<u64> = (0..args.instances).map(|i| args.seed + i).collect();
    let next = AtomicU64::new(0);
    let mut outcomes: Vec<(u64, SimOutcome)> = std::thread::scope(|scope| {
        let workers: Vec<_> = (0..args.jobs.min(seeds.len().max(1)))
            .map(|_| {
                scope.spawn(|| {
                    let mut local = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed) as usize;
                        let Some(&seed) = seeds.get(i) else { break };
                        let mut config = base_config.clone();
                        config.seed = seed;
                        let outcome = run_simulation(&grid, &config, &specs, |_| {});
                        local.push((seed, outcome));
                    }
                    local
                })
            })
            .collect();
        workers
            .into_iter()
            .flat_map(|w| w.join().expect("bench worker panicked"))
            .collect()
    });
    outcomes.sort_by_key(|(seed, _)| *seed);

    // Flatten records grouped per planner, in the order requested.
    let mut all_records: Vec<TaskRecord> = Vec::new();
    let mut per_planner: Vec<(String, Vec<TaskRecord>)> = Vec::new();
    for (_, outcome) in &outcomes {
        for (i, trace) in outcome.planners.iter().enumerate() {
            if per_planner.len() <= i {
                per_planner.push((trace.planner.clone(), Vec::new()));
            }
            per_planner[i].1.extend(trace.records.iter().cloned());
        }
    }
    for (_, records) in &per_planner {
        all_records.extend(records.iter().cloned());
    }

    let arrived = outcomes.iter().filter(|(_, o)| o.arrived).count();
    let timed_out = outcomes.iter().filter(|(_, o)| o.timed_out).count();
    println!(
        "map={} M={} protocol={:?} instances={} base-seed={} k={} (driver={})",
        args.map.display(),
        args.objectives,
        args.protocol,
        args.instances,
        args.seed,
        args.k,
        per_planner.first().map(|(n, _)| n.as_str()).unwrap_or("-"),
    );
    println!(
        "arrived: {arrived}/{}  timed-out instances: {timed_out}",
        outcomes.len()
    );
    println!(
        "{:<10} {:>12} {:>12} {:>8} {:>12} {:>12} {:>7}",
        "planner", "Exp.", "R.T.(s)", "Sol.", "init.Exp", "init.R.T.", "tasks"
    );
    for (name, records) in &per_planner {
        let initial: Vec<&TaskRecord> = records.iter().filter(|r| r.task == 0).collect();
        let init_exp =
            initial.iter().map(|r| r.expansions as f64).sum::<f64>() / initial.len().max(1) as f64;
        let init_rt =
            initial.iter().map(|r| r.runtime_s).sum::<f64>() / initial.len().max(1) as f64;
        let tasks = records.iter().filter(|r| r.task >= 1).count();
        match summarize_subsequent(records) {
            Some((exp, rt, sol)) => println!(
                "{name:<10} {exp:>12.1} {rt:>12.4} {sol:>8.1} {init_exp:>12.1} {init_rt:>12.4} {tasks:>7}"
            ),
            None => println!(
                "{name:<10} {:>12} {:>12} {:>8} {init_exp:>12.1} {init_rt:>12.4} {tasks:>7}",
                "-", "-", "-"
            ),
        }
    }

    let stem = args
        .map
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "map".into());
    let default_name = format!(
        "bench-{stem}-m{}-{:?}.{}",
        args.objectives,
        args.protocol,
        format_ext(args.format)
    )
    .to_lowercase();
    if let Some(path) = resolve_out(args.out, &default_name) {
        write_records(&path, args.format, &all_records)?;
        println!("trace written to {}", path.display());
    }
    if let Some(path) = args.scatter {
        let file = std::fs::File::create(&path).map_err(Failure::io)?;
        mopbd::simulator::write_scatter_csv(&all_records, std::io::BufWriter::new(file))
            .map_err(|e| Failure::Io(anyhow::anyhow!("{e}")))?;
        println!("scatter data written to {}", path.display());
    }
    Ok(())
}

use crate::util::{format_ext, load_map, parse_planners, resolve_out, sim_config, write_records};
use crate::{Failure, RunArgs};
use mopbd::simulator::run_instance;

pub fn cmd_run(args: RunArgs) -> Result<(), Failure> {
    let grid = load_map(&args.map)?;
    let spec = parse_planners(std::slice::from_ref(&args.planner), args.eps)?[0];
    let config = sim_config(
        args.objectives,
        args.seed,
        args.k,
        args.protocol,
        args.time_limit,
    )?;

    let outcome = run_instance(&grid, &config, spec);
    let records = &outcome.planners[0].records;
    for r in records {
        let ratio = r
            .lk_over_l0
            .map(|v| format!("{v:.3}"))
            .unwrap_or_else(|| "-".into());
        println!(
            "task {:>3}  event={:<24} exp={:<8} rt={:.6}s sol={:<4} lk/l0={}{}",
            r.task,
            r.event,
            r.expansions,
            r.runtime_s,
            r.solutions,
            ratio,
            if r.timed_out { "  TIMED-OUT" } else { "" },
        );
    }
    let status = if outcome.timed_out {
        "aborted (task deadline exceeded)"
    } else if outcome.arrived {
        "robot arrived at the destination"
    } else {
        "no feasible paths remain"
    };
    println!("{status} after {} planning task(s)", records.len());

    let default_name = format!("run-seed{}.{}", args.seed, format_ext(args.format));
    if let Some(path) = resolve_out(args.out, &default_name) {
        write_records(&path, args.format, records)?;
        println!("trace written to {}", path.display());
    }
    Ok(())
}

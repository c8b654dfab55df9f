use crate::{Failure, ProtocolArg, VerifyArgs};
use mopbd::costvec::covered_within_factor;
use mopbd::exhaustive::enumerate_front;
use mopbd::simulator::{run_simulation, PlannerSpec};
use mopbd::{CostVec, GridMap};

/// Re-solve every planning task of every seeded instance with independent
/// oracles and compare. Exact runs must match the from-scratch front
/// set-for-set (and the exhaustive enumeration on grids small enough to
/// enumerate); approximate runs must cover the exact front within
/// (1+eps)^L where L is the cell count.
pub fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    if args.size < 2 {
        return Err(Failure::Usage("--size must be at least 2".into()));
    }
    if args.size > 6 {
        return Err(Failure::Usage(
            "--size above 6 is not supported: the oracles need small grids".into(),
        ));
    }
    let grid = GridMap::empty(args.size, args.size);
    let driver_name = if args.eps > 0.0 { "mopbd-eps" } else { "mopbd" };
    let driver = PlannerSpec::parse(driver_name, args.eps).expect("known planner name");
    let cover_factor = (1.0 + args.eps).powi((args.size * args.size) as i32);

    let mut failures: Vec<String> = Vec::new();
    let mut tasks_checked = 0u64;
    for i in 0..args.instances {
        let seed = args.seed + i;
        let config =
            crate::util::sim_config(args.objectives, seed, args.k, ProtocolArg::Ahead, None)?;
        run_simulation(&grid, &config, &[driver], |ctx| {
            tasks_checked += 1;
            let mut checked = ctx.plans[0].1.front.clone();
            if args.inject_fault && !checked.is_empty() {
                checked.pop();
            }
            let mut oracle = PlannerSpec::parse("namoa", 0.0)
                .expect("known planner name")
                .build(ctx.graph, &grid, ctx.u_d, ctx.u_c);
            let exact = oracle.plan(ctx.graph, None).expect("no deadline set").front;

            if args.eps == 0.0 {
                if checked != exact {
                    failures.push(mismatch(seed, ctx.task, "from-scratch", &checked, &exact));
                }
                if args.size <= 4 {
                    let enumerated = enumerate_front(ctx.graph, ctx.u_c, ctx.u_d);
                    if exact != enumerated {
                        failures.push(mismatch(seed, ctx.task, "enumeration", &exact, &enumerated));
                    }
                }
            } else {
                for c_star in &exact {
                    let covered = checked
                        .iter()
                        .any(|c| covered_within_factor(c, c_star, cover_factor));
                    if !covered {
                        failures.push(format!(
                            "seed {seed} task {}: {c_star} not covered within (1+{})^{} by {:?}",
                            ctx.task,
                            args.eps,
                            args.size * args.size,
                            checked.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
                        ));
                    }
                }
            }
        });
        if failures.len() > 8 {
            break;
        }
    }

    if failures.is_empty() {
        println!(
            "verified {} instance(s), {tasks_checked} planning task(s): OK (size={}, M={}, eps={})",
            args.instances, args.size, args.objectives, args.eps
        );
        Ok(())
    } else {
        Err(Failure::Verification(failures.join("\n")))
    }
}

fn mismatch(seed: u64, task: usize, oracle: &str, got: &[CostVec], want: &[CostVec]) -> String {
    format!(
        "seed {seed} task {task}: front disagrees with {oracle}\n  got:  {:?}\n  want: {:?}",
        got.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        want.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
    )
}

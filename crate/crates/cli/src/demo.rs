use crate::Failure;
use mopbd::scalarize::run_demo;

pub fn cmd_scalarization_demo() -> Result<(), Failure> {
    let report = run_demo();
    println!("bi-objective instance with three routes; exact Pareto front:");
    println!(
        "  {}",
        report
            .front
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join("  ")
    );
    println!();
    println!("weighted-sum sweep, scalar cost w*c1 + (1-w)*c2 per front point:");
    print!("{:>5}", "w");
    for c in &report.front {
        print!("{:>10}", c.to_string());
    }
    println!("{:>12}", "returned");
    for w in &report.sweep {
        print!("{:>5.1}", w.weight);
        for (_, s) in &w.front_scalar_costs {
            print!("{s:>10.2}");
        }
        println!("{:>12}", w.returned.to_string());
    }
    println!();
    if report.never_returned.is_empty() {
        println!("every front point is reachable by some weight");
    } else {
        println!(
            "returned by no weight in the sweep: {}",
            report
                .never_returned
                .iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join("  ")
        );
        println!("the exact planner finds all {} points", report.front.len());
    }
    Ok(())
}

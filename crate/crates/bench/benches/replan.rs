use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use mopbd::simulator::{run_instance, PlannerSpec, SimConfig};
use mopbd_bench::fixture;
use std::hint::black_box;

/// Whole-instance replanning loop (initial plan, obstacle events, replans)
/// per planner, on both small and maze maps.
fn replanning(c: &mut Criterion) {
    let mut group = c.benchmark_group("replan_instance");
    group.sample_size(10);
    for map in ["empty-16-16.map", "maze-32-32-2.map"] {
        let grid = fixture(map);
        for planner in ["mopbd", "mopbd-i", "namoa", "mod"] {
            let spec = PlannerSpec::parse(planner, 0.0).expect("known planner");
            group.bench_with_input(BenchmarkId::new(planner, map), &spec, |b, spec| {
                b.iter(|| {
                    let config = SimConfig::ahead(2, 7);
                    black_box(run_instance(&grid, &config, *spec))
                })
            });
        }
    }
    group.finish();
}

criterion_group!(benches, replanning);
criterion_main!(benches);

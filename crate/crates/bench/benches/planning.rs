use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dualhead_bench::empty_problem;
use dualhead_core::control::{simulate, Direction};
use dualhead_core::metrics::{nearest_index, WeightedDistance, DEFAULT_KAPPA};
use dualhead_core::planner::plan;
use dualhead_core::{ControlParams, Pose};

fn planning(c: &mut Criterion) {
    let problem = empty_problem(500);
    c.bench_function("plan_empty_500", |b| b.iter(|| plan(black_box(&problem))));
}

fn nearest(c: &mut Criterion) {
    let graph = plan(&empty_problem(1000)).graph;
    let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
    let query = Pose::new(4.0, 6.0, 1.0);
    c.bench_function("nearest_dualhead", |b| {
        b.iter(|| nearest_index(black_box(graph.poses()), black_box(&query), &wd))
    });
}

fn controller(c: &mut Criterion) {
    let params = ControlParams::default();
    let start = Pose::new(0.0, 0.0, 1.0);
    let goal = Pose::new(1.0, 0.0, -0.5);
    c.bench_function("simulate_forward", |b| {
        b.iter(|| {
            simulate(
                black_box(&start),
                black_box(&goal),
                &params,
                Direction::Auto,
            )
        })
    });
}

criterion_group!(benches, planning, nearest, controller);
criterion_main!(benches);

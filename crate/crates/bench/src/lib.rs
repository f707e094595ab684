//! Shared fixtures for the planner benchmarks.

use dualhead_core::{ControlParams, PlannerParams, Pose, Problem, Vec2, World};

/// Empty 10 x 10 world with the standard start and goal.
pub fn empty_problem(samples: usize) -> Problem {
    let world =
        World::empty(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0), 0.2).expect("valid workspace");
    Problem::new(
        world,
        Pose::new(1.0, 5.0, 0.0),
        Pose::new(9.0, 5.0, 0.0),
        PlannerParams {
            samples,
            ..PlannerParams::default()
        },
        ControlParams::default(),
    )
    .expect("valid problem")
}

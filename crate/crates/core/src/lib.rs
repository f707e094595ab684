//! Feedback motion planning for unicycle robots: dual-headway controllers,
//! convex motion prediction, pose distances, an optimal random tree planner
//! and a sequential-composition executor.

pub mod control;
pub mod error;
pub mod executor;
pub mod export;
pub mod geom;
pub mod metrics;
pub mod planner;
pub mod prediction;
pub mod sweep;
pub mod world;

pub use control::{ControlInput, ControlParams, Direction, Motion, Pose, Trajectory};
pub use error::{
    ControlError, ExecError, GeomError, GraphError, MetricError, PredictionError, SampleError,
    ScenarioError,
};
pub use geom::{Ball, ConvexPolygon, Shape, Vec2};
pub use metrics::{DistanceKind, WeightedDistance};
pub use planner::{CostMode, Informed, MotionGraph, Objective, PlanResult, PlannerParams};
pub use prediction::MotionBound;
pub use world::{load_scenario, Problem, World};

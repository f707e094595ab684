//! Workspace, obstacles and free-space queries for a disk-shaped robot, plus
//! the scenario file format that describes a planning problem.

use std::f64::consts::PI;
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::control::{ControlParams, Pose};
use crate::error::{SampleError, ScenarioError};
use crate::geom::{separation, Ball, ConvexPolygon, Shape, Vec2};
use crate::planner::PlannerParams;

/// Maximum rejection-sampling attempts per free pose.
pub const MAX_SAMPLE_TRIES: usize = 1_000_000;

/// Axis-aligned rectangular workspace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Workspace {
    pub min: Vec2,
    pub max: Vec2,
}

impl Workspace {
    pub fn new(min: Vec2, max: Vec2) -> Result<Self, ScenarioError> {
        if !(min.is_finite() && max.is_finite()) || !(max.x > min.x && max.y > min.y) {
            return Err(ScenarioError::invalid(
                "workspace",
                "must have positive area",
            ));
        }
        Ok(Workspace { min, max })
    }

    /// True iff the disk of radius `margin` around `p` lies inside the workspace.
    pub fn contains_with_margin(&self, p: Vec2, margin: f64) -> bool {
        p.x - margin >= self.min.x
            && p.x + margin <= self.max.x
            && p.y - margin >= self.min.y
            && p.y + margin <= self.max.y
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub workspace: Workspace,
    pub obstacles: Vec<Shape>,
    pub robot_radius: f64,
}

impl World {
    pub fn new(
        workspace: Workspace,
        obstacles: Vec<Shape>,
        robot_radius: f64,
    ) -> Result<Self, ScenarioError> {
        if !(robot_radius > 0.0 && robot_radius.is_finite()) {
            return Err(ScenarioError::invalid("robot_radius", "must be positive"));
        }
        Ok(World {
            workspace,
            obstacles,
            robot_radius,
        })
    }

    pub fn empty(min: Vec2, max: Vec2, robot_radius: f64) -> Result<Self, ScenarioError> {
        World::new(Workspace::new(min, max)?, Vec::new(), robot_radius)
    }

    /// Smallest distance from `p` to any obstacle (infinite without obstacles).
    pub fn clearance(&self, p: Vec2) -> f64 {
        self.obstacles
            .iter()
            .map(|o| o.distance_to_point(p))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn pose_is_free(&self, x: Vec2) -> bool {
        pose_is_free(self, x)
    }

    pub fn region_is_free(&self, hull: &ConvexPolygon) -> bool {
        region_is_free(self, hull)
    }
}

/// True iff the robot disk at `x` stays in the workspace and keeps a strictly
/// positive gap to every obstacle.
pub fn pose_is_free(world: &World, x: Vec2) -> bool {
    world.workspace.contains_with_margin(x, world.robot_radius)
        && world
            .obstacles
            .iter()
            .all(|o| o.distance_to_point(x) > world.robot_radius)
}

/// True iff every robot position in `hull` is free: the hull dilated by the
/// robot radius stays in the workspace and clear of every obstacle.
pub fn region_is_free(world: &World, hull: &ConvexPolygon) -> bool {
    hull.vertices()
        .iter()
        .all(|&v| world.workspace.contains_with_margin(v, world.robot_radius))
        && world
            .obstacles
            .iter()
            .all(|o| separation(hull, o) > world.robot_radius)
}

/// Goal-biased uniform pose sampler.
///
/// Draw order per call: one bias coin; then for each try two position
/// coordinates; then one heading for the accepted position.
pub fn sample_free_pose<R: Rng + ?Sized>(
    world: &World,
    rng: &mut R,
    goal: &Pose,
    goal_bias: f64,
) -> Result<Pose, SampleError> {
    let coin: f64 = rng.gen();
    if coin < goal_bias {
        return Ok(*goal);
    }
    let ws = world.workspace;
    for _ in 0..MAX_SAMPLE_TRIES {
        let x = ws.min.x + (ws.max.x - ws.min.x) * rng.gen::<f64>();
        let y = ws.min.y + (ws.max.y - ws.min.y) * rng.gen::<f64>();
        let p = Vec2::new(x, y);
        if pose_is_free(world, p) {
            let theta = -PI + 2.0 * PI * rng.gen::<f64>();
            return Ok(Pose::from_parts(p, theta));
        }
    }
    Err(SampleError::FreeSpaceTooSmall {
        tries: MAX_SAMPLE_TRIES,
    })
}

/// A fully validated planning problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub world: World,
    pub start: Pose,
    pub goal: Pose,
    pub planner: PlannerParams,
    pub control: ControlParams,
}

impl Problem {
    pub fn new(
        world: World,
        start: Pose,
        goal: Pose,
        planner: PlannerParams,
        control: ControlParams,
    ) -> Result<Self, ScenarioError> {
        control.validate()?;
        planner.validate()?;
        if !start.is_finite() || !world.pose_is_free(start.position) {
            return Err(ScenarioError::StartNotFree);
        }
        if !goal.is_finite() || !world.pose_is_free(goal.position) {
            return Err(ScenarioError::GoalNotFree);
        }
        Ok(Problem {
            world,
            start,
            goal,
            planner,
            control,
        })
    }

    /// Re-validates after fields were edited in place (e.g. by CLI flags).
    pub fn revalidate(self) -> Result<Self, ScenarioError> {
        Problem::new(
            self.world,
            self.start,
            self.goal,
            self.planner,
            self.control,
        )
    }

    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        let file: ScenarioFile = serde_json::from_str(text)?;
        file.into_problem()
    }

    pub fn to_scenario_file(&self) -> ScenarioFile {
        ScenarioFile::from_problem(self)
    }
}

/// Reads and validates a scenario document.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Problem, ScenarioError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Problem::from_json(&text)
}

// On-disk schema. Points are `[x, y]` arrays, poses `{x, y, theta}`.

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorkspaceSpec {
    pub min: [f64; 2],
    pub max: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleSpec {
    Polygon { vertices: Vec<[f64; 2]> },
    Ball { center: [f64; 2], radius: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseSpec {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub theta: f64,
}

impl From<PoseSpec> for Pose {
    fn from(p: PoseSpec) -> Pose {
        Pose::new(p.x, p.y, p.theta)
    }
}

impl From<Pose> for PoseSpec {
    fn from(p: Pose) -> PoseSpec {
        PoseSpec {
            x: p.position.x,
            y: p.position.y,
            theta: p.theta,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub workspace: WorkspaceSpec,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
    pub robot_radius: f64,
    pub start: PoseSpec,
    pub goal: PoseSpec,
    #[serde(default)]
    pub planner: PlannerParams,
    #[serde(default)]
    pub control: ControlParams,
}

fn v2(p: [f64; 2]) -> Vec2 {
    Vec2::new(p[0], p[1])
}

impl ScenarioFile {
    pub fn into_problem(self) -> Result<Problem, ScenarioError> {
        let workspace = Workspace::new(v2(self.workspace.min), v2(self.workspace.max))?;
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (index, spec) in self.obstacles.into_iter().enumerate() {
            let shape = match spec {
                ObstacleSpec::Polygon { vertices } => {
                    let pts: Vec<Vec2> = vertices.into_iter().map(v2).collect();
                    ConvexPolygon::from_convex_vertices(&pts)
                        .map(Shape::Polygon)
                        .map_err(|source| ScenarioError::Obstacle { index, source })?
                }
                ObstacleSpec::Ball { center, radius } => Ball::new(v2(center), radius)
                    .map(Shape::Ball)
                    .map_err(|source| ScenarioError::Obstacle { index, source })?,
            };
            obstacles.push(shape);
        }
        let world = World::new(workspace, obstacles, self.robot_radius)?;
        Problem::new(
            world,
            self.start.into(),
            self.goal.into(),
            self.planner,
            self.control,
        )
    }

    pub fn from_problem(problem: &Problem) -> Self {
        let w = &problem.world;
        ScenarioFile {
            workspace: WorkspaceSpec {
                min: [w.workspace.min.x, w.workspace.min.y],
                max: [w.workspace.max.x, w.workspace.max.y],
            },
            obstacles: w
                .obstacles
                .iter()
                .map(|o| match o {
                    Shape::Polygon(p) => ObstacleSpec::Polygon {
                        vertices: p.vertices().iter().map(|v| [v.x, v.y]).collect(),
                    },
                    Shape::Ball(b) => ObstacleSpec::Ball {
                        center: [b.center.x, b.center.y],
                        radius: b.radius,
                    },
                })
                .collect(),
            robot_radius: w.robot_radius,
            start: problem.start.into(),
            goal: problem.goal.into(),
            planner: problem.planner.clone(),
            control: problem.control,
        }
    }
}

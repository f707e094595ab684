//! Kinematic unicycle model and the forward/backward dual-headway pose
//! controllers.
//!
//! The forward controller drives the headway point `x + eps_h |x - g| o(theta)`
//! of the robot toward the tailway point `g - eps_t |x - g| o(theta_g)` of the
//! goal with first-order reference dynamics. The backward controller mirrors
//! this with the robot's tailway point chasing the goal's headway point.

use serde::{Deserialize, Serialize};

use crate::error::{ControlError, ScenarioError};
use crate::geom::{heading_vectors, wrap_angle, Vec2};

/// Planar position and heading. The heading is kept in `[-pi, pi)`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Pose {
    pub position: Vec2,
    pub theta: f64,
}

impl Pose {
    pub fn new(x: f64, y: f64, theta: f64) -> Self {
        Pose {
            position: Vec2::new(x, y),
            theta: wrap_angle(theta),
        }
    }

    pub fn from_parts(position: Vec2, theta: f64) -> Self {
        Pose {
            position,
            theta: wrap_angle(theta),
        }
    }

    pub fn heading(&self) -> Vec2 {
        Vec2::heading(self.theta)
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite() && self.theta.is_finite()
    }

    /// Absolute heading difference in `[0, pi]`.
    pub fn heading_error(&self, other: &Pose) -> f64 {
        wrap_angle(self.theta - other.theta).abs()
    }
}

/// Linear and angular velocity command.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ControlInput {
    pub v: f64,
    pub omega: f64,
}

impl ControlInput {
    pub const ZERO: ControlInput = ControlInput { v: 0.0, omega: 0.0 };

    pub fn new(v: f64, omega: f64) -> Self {
        ControlInput { v, omega }
    }
}

/// Coefficients of both controllers plus integration settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ControlParams {
    /// Forward headway coefficient.
    pub eps_h: f64,
    /// Forward (goal) tailway coefficient.
    pub eps_t: f64,
    /// Backward tailway coefficient.
    pub eps_bar_t: f64,
    /// Backward (goal) headway coefficient.
    pub eps_bar_h: f64,
    /// Reference dynamics gain, 1/s.
    pub gamma: f64,
    /// Fixed RK4 step, s.
    pub step: f64,
    /// Position tolerance for reaching a goal, m.
    pub goal_tolerance: f64,
    /// Heading tolerance for reaching a goal, rad.
    pub theta_tolerance: f64,
    /// Simulation horizon, s.
    pub horizon: f64,
}

impl Default for ControlParams {
    fn default() -> Self {
        ControlParams {
            eps_h: 0.25,
            eps_t: 0.25,
            eps_bar_t: 0.25,
            eps_bar_h: 0.25,
            gamma: 1.0,
            step: 1e-3,
            goal_tolerance: 1e-3,
            theta_tolerance: 1e-2,
            horizon: 60.0,
        }
    }
}

impl ControlParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let positive = [
            ("control.eps_h", self.eps_h),
            ("control.eps_t", self.eps_t),
            ("control.eps_bar_t", self.eps_bar_t),
            ("control.eps_bar_h", self.eps_bar_h),
            ("control.gamma", self.gamma),
            ("control.step", self.step),
            ("control.goal_tolerance", self.goal_tolerance),
            ("control.theta_tolerance", self.theta_tolerance),
            ("control.horizon", self.horizon),
        ];
        for (field, value) in positive {
            if !(value > 0.0 && value.is_finite()) {
                return Err(ScenarioError::invalid(
                    field,
                    format!("must be positive, got {value}"),
                ));
            }
        }
        let sum = self.eps_h + self.eps_t;
        if sum >= 1.0 {
            return Err(ScenarioError::invalid(
                "control.eps_h",
                format!("ε_h+ε_t ≥ 1 (got {sum})"),
            ));
        }
        let fwd = 2.0 * self.eps_h + self.eps_t;
        if fwd >= 1.0 {
            return Err(ScenarioError::invalid(
                "control.eps_h",
                format!("2ε_h+ε_t ≥ 1 (got {fwd})"),
            ));
        }
        let bwd = 2.0 * self.eps_bar_t + self.eps_bar_h;
        if bwd >= 1.0 {
            return Err(ScenarioError::invalid(
                "control.eps_bar_t",
                format!("2ε̄_t+ε̄_h ≥ 1 (got {bwd})"),
            ));
        }
        Ok(())
    }
}

/// Which controller drives the robot.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Motion {
    Forward,
    Backward,
}

/// Controller selection for [`simulate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    /// Whichever domain contains the start, forward first.
    Auto,
}

/// Robot headway point and goal tailway point.
pub fn anchor_points_forward(pose: &Pose, goal: &Pose, eps_h: f64, eps_t: f64) -> (Vec2, Vec2) {
    let dist = pose.position.distance(goal.position);
    let head = pose.position + pose.heading() * (eps_h * dist);
    let tail_g = goal.position - goal.heading() * (eps_t * dist);
    (head, tail_g)
}

/// Robot tailway point and goal headway point.
pub fn anchor_points_backward(
    pose: &Pose,
    goal: &Pose,
    eps_bar_t: f64,
    eps_bar_h: f64,
) -> (Vec2, Vec2) {
    let dist = pose.position.distance(goal.position);
    let tail = pose.position - pose.heading() * (eps_bar_t * dist);
    let head_g = goal.position + goal.heading() * (eps_bar_h * dist);
    (tail, head_g)
}

/// The dual-headway law, valid for any `x != g` (no domain check).
pub fn forward_law(pose: &Pose, goal: &Pose, params: &ControlParams) -> ControlInput {
    let offset = pose.position - goal.position;
    let dist = offset.norm();
    if dist == 0.0 {
        return ControlInput::ZERO;
    }
    let (o, n) = heading_vectors(pose.theta);
    let (head, tail_g) = anchor_points_forward(pose, goal, params.eps_h, params.eps_t);
    let err = head - tail_g;
    let v = -params.gamma * err.dot(o) / (1.0 + params.eps_h * offset.dot(o) / dist);
    let omega = -params.gamma * err.dot(n) / (params.eps_h * dist);
    ControlInput { v, omega }
}

/// Backward dual-headway law, valid for any `x != g` (no domain check).
pub fn backward_law(pose: &Pose, goal: &Pose, params: &ControlParams) -> ControlInput {
    let offset = pose.position - goal.position;
    let dist = offset.norm();
    if dist == 0.0 {
        return ControlInput::ZERO;
    }
    let (o, n) = heading_vectors(pose.theta);
    let (tail, head_g) = anchor_points_backward(pose, goal, params.eps_bar_t, params.eps_bar_h);
    let err = tail - head_g;
    let v = -params.gamma * err.dot(o) / (1.0 - params.eps_bar_t * offset.dot(o) / dist);
    let omega = params.gamma * err.dot(n) / (params.eps_bar_t * dist);
    ControlInput { v, omega }
}

/// Forward controller; `None` once the robot is within the goal tolerance.
pub fn forward_control(pose: &Pose, goal: &Pose, params: &ControlParams) -> Option<ControlInput> {
    if pose.position.distance(goal.position) <= params.goal_tolerance {
        return None;
    }
    Some(forward_law(pose, goal, params))
}

/// Backward controller; `None` once the robot is within the goal tolerance.
pub fn backward_control(pose: &Pose, goal: &Pose, params: &ControlParams) -> Option<ControlInput> {
    if pose.position.distance(goal.position) <= params.goal_tolerance {
        return None;
    }
    Some(backward_law(pose, goal, params))
}

/// Membership in the forward motion domain.
///
/// Evaluated without normalizing: `(tail_g - head) . o(theta) >= 0` and
/// `(tail_g - head) . o(theta_g) > -|tail_g - head|`. When the anchors coincide
/// the second condition is false.
pub fn in_forward_domain(pose: &Pose, goal: &Pose, params: &ControlParams) -> bool {
    let (head, tail_g) = anchor_points_forward(pose, goal, params.eps_h, params.eps_t);
    let d = tail_g - head;
    d.dot(pose.heading()) >= 0.0 && d.dot(goal.heading()) > -d.norm()
}

/// Membership in the backward motion domain (mirror of the forward one).
pub fn in_backward_domain(pose: &Pose, goal: &Pose, params: &ControlParams) -> bool {
    let (tail, head_g) = anchor_points_backward(pose, goal, params.eps_bar_t, params.eps_bar_h);
    let d = head_g - tail;
    d.dot(pose.heading()) <= 0.0 && d.dot(goal.heading()) < d.norm()
}

/// The domain containing `pose`, forward taking precedence on the shared boundary.
pub fn domain_of(pose: &Pose, goal: &Pose, params: &ControlParams) -> Option<Motion> {
    if in_forward_domain(pose, goal, params) {
        Some(Motion::Forward)
    } else if in_backward_domain(pose, goal, params) {
        Some(Motion::Backward)
    } else {
        None
    }
}

/// Rotate-in-place symmetry breaker for poses outside both domains.
pub fn fallback_rotation(pose: &Pose, goal: &Pose, params: &ControlParams) -> ControlInput {
    let (head, tail_g) = anchor_points_forward(pose, goal, params.eps_h, params.eps_t);
    let (_, n) = heading_vectors(pose.theta);
    let side = (tail_g - head).dot(n);
    let sign = if side < 0.0 { -1.0 } else { 1.0 };
    ControlInput::new(0.0, params.gamma * sign)
}

pub fn law_for(motion: Motion) -> fn(&Pose, &Pose, &ControlParams) -> ControlInput {
    match motion {
        Motion::Forward => forward_law,
        Motion::Backward => backward_law,
    }
}

fn derivative(theta: f64, u: ControlInput) -> (Vec2, f64) {
    (Vec2::heading(theta) * u.v, u.omega)
}

/// One RK4 step of the unicycle kinematics under a constant input.
pub fn integrate_step(pose: &Pose, u: ControlInput, h: f64) -> Pose {
    let (k1x, k1t) = derivative(pose.theta, u);
    let (k2x, k2t) = derivative(pose.theta + 0.5 * h * k1t, u);
    let (k3x, k3t) = derivative(pose.theta + 0.5 * h * k2t, u);
    let (k4x, k4t) = derivative(pose.theta + h * k3t, u);
    let dx = (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
    let dt = (k1t + 2.0 * k2t + 2.0 * k3t + k4t) * (h / 6.0);
    Pose::from_parts(pose.position + dx, pose.theta + dt)
}

/// One RK4 step of the closed loop `u = law(pose)`, re-evaluating the law at
/// every stage.
pub fn closed_loop_step<F>(pose: &Pose, h: f64, law: &F) -> Pose
where
    F: Fn(&Pose) -> ControlInput,
{
    let stage = |p: &Pose| derivative(p.theta, law(p));
    let shift = |dx: Vec2, dt: f64, s: f64| Pose {
        position: pose.position + dx * s,
        theta: pose.theta + dt * s,
    };
    let (k1x, k1t) = stage(pose);
    let (k2x, k2t) = stage(&shift(k1x, k1t, 0.5 * h));
    let (k3x, k3t) = stage(&shift(k2x, k2t, 0.5 * h));
    let (k4x, k4t) = stage(&shift(k3x, k3t, h));
    let dx = (k1x + k2x * 2.0 + k3x * 2.0 + k4x) * (h / 6.0);
    let dt = (k1t + 2.0 * k2t + 2.0 * k3t + k4t) * (h / 6.0);
    Pose::from_parts(pose.position + dx, pose.theta + dt)
}

/// One recorded sample: the pose at time `t` and the input applied from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub pose: Pose,
    pub input: ControlInput,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Trajectory {
    pub samples: Vec<TrajectorySample>,
    /// Accumulated `sum |v| h`.
    pub path_length: f64,
    /// Accumulated `sum |omega| h`.
    pub turning: f64,
    pub converged: bool,
}

impl Trajectory {
    pub fn final_pose(&self) -> Option<Pose> {
        self.samples.last().map(|s| s.pose)
    }
}

/// True once both position and heading tolerances are met.
pub fn reached(pose: &Pose, goal: &Pose, params: &ControlParams) -> bool {
    pose.position.distance(goal.position) <= params.goal_tolerance
        && pose.heading_error(goal) <= params.theta_tolerance
}

/// Integrates a translation-invariant control law toward `goal`.
///
/// The state is propagated relative to the goal position, so the law keeps
/// steering inside the goal ball (until the heading tolerance is met as well)
/// without losing precision. `law` receives `(pose, goal)` in those shifted
/// coordinates. Every step is recorded, followed by the terminal pose with a
/// zero input.
pub fn simulate_with<F>(start: &Pose, goal: &Pose, params: &ControlParams, law: F) -> Trajectory
where
    F: Fn(&Pose, &Pose) -> ControlInput,
{
    let origin = goal.position;
    let local_goal = Pose {
        position: Vec2::ZERO,
        theta: goal.theta,
    };
    let to_world = |p: &Pose| Pose {
        position: p.position + origin,
        theta: p.theta,
    };
    let mut traj = Trajectory::default();
    let mut pose = Pose {
        position: start.position - origin,
        theta: start.theta,
    };
    if reached(&pose, &local_goal, params) {
        traj.converged = true;
        return traj;
    }
    let h = params.step;
    let steps = (params.horizon / h).ceil() as usize;
    let closed = |p: &Pose| law(p, &local_goal);
    for k in 0..steps {
        let u = closed(&pose);
        traj.samples.push(TrajectorySample {
            t: k as f64 * h,
            pose: to_world(&pose),
            input: u,
        });
        traj.path_length += u.v.abs() * h;
        traj.turning += u.omega.abs() * h;
        pose = closed_loop_step(&pose, h, &closed);
        if reached(&pose, &local_goal, params) {
            traj.converged = true;
            traj.samples.push(TrajectorySample {
                t: (k + 1) as f64 * h,
                pose: to_world(&pose),
                input: ControlInput::ZERO,
            });
            return traj;
        }
        if pose.position == Vec2::ZERO {
            // Exactly at the goal position with a misaligned heading: the law is undefined.
            break;
        }
    }
    traj.samples.push(TrajectorySample {
        t: traj.samples.len() as f64 * h,
        pose: to_world(&pose),
        input: ControlInput::ZERO,
    });
    traj
}

/// Runs the forward or backward controller from `start` until the goal pose is
/// reached or the horizon elapses.
pub fn simulate(
    start: &Pose,
    goal: &Pose,
    params: &ControlParams,
    direction: Direction,
) -> Result<Trajectory, ControlError> {
    if reached(start, goal, params) {
        return Ok(Trajectory {
            converged: true,
            ..Trajectory::default()
        });
    }
    let motion = match direction {
        Direction::Auto => domain_of(start, goal, params).ok_or(ControlError::OutsideDomain)?,
        Direction::Forward if in_forward_domain(start, goal, params) => Motion::Forward,
        Direction::Backward if in_backward_domain(start, goal, params) => Motion::Backward,
        _ => return Err(ControlError::OutsideDomain),
    };
    let law = law_for(motion);
    let traj = simulate_with(start, goal, params, |p, g| law(p, g, params));
    if traj.converged {
        Ok(traj)
    } else {
        Err(ControlError::NotConverged {
            horizon: params.horizon,
            partial: Box::new(traj),
        })
    }
}

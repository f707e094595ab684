//! Convex bounds on closed-loop motion and the safe-reachability test.

use crate::control::{
    anchor_points_backward, anchor_points_forward, in_backward_domain, in_forward_domain,
    ControlParams, Motion, Pose,
};
use crate::error::PredictionError;
use crate::geom::{convex_hull, Ball, ConvexPolygon};
use crate::world::World;

/// A region containing the entire future closed-loop trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionBound {
    pub hull: ConvexPolygon,
    pub ball: Ball,
}

/// `conv(x, anchor, goal anchor, g)` for the given motion, without a domain check.
pub fn prediction_hull(
    pose: &Pose,
    goal: &Pose,
    params: &ControlParams,
    motion: Motion,
) -> ConvexPolygon {
    let (a, b) = match motion {
        Motion::Forward => anchor_points_forward(pose, goal, params.eps_h, params.eps_t),
        Motion::Backward => anchor_points_backward(pose, goal, params.eps_bar_t, params.eps_bar_h),
    };
    // Four finite points always give a non-empty hull.
    convex_hull(&[pose.position, a, b, goal.position]).expect("finite anchor points")
}

/// Hull of the pose, its anchor, the goal anchor and the goal, plus the
/// goal-centred ball through the current position.
pub fn motion_bound(
    pose: &Pose,
    goal: &Pose,
    params: &ControlParams,
    motion: Motion,
) -> Result<MotionBound, PredictionError> {
    let inside = match motion {
        Motion::Forward => in_forward_domain(pose, goal, params),
        Motion::Backward => in_backward_domain(pose, goal, params),
    };
    if !inside || !pose.is_finite() || !goal.is_finite() {
        return Err(PredictionError::OutsideDomain);
    }
    let radius = pose.position.distance(goal.position);
    Ok(MotionBound {
        hull: prediction_hull(pose, goal, params, motion),
        ball: Ball {
            center: goal.position,
            radius,
        },
    })
}

/// The motion used to reach `to` safely from `from`, forward first.
pub fn safe_motion(
    from: &Pose,
    to: &Pose,
    world: &World,
    params: &ControlParams,
) -> Option<Motion> {
    if !from.is_finite() || !to.is_finite() {
        return None;
    }
    [Motion::Forward, Motion::Backward].into_iter().find(|&m| {
        let inside = match m {
            Motion::Forward => in_forward_domain(from, to, params),
            Motion::Backward => in_backward_domain(from, to, params),
        };
        inside && world.region_is_free(&prediction_hull(from, to, params, m))
    })
}

/// True iff `to` is reachable from `from` by one of the two controllers with
/// a motion bound that lies entirely in free space.
pub fn issafe(from: &Pose, to: &Pose, world: &World, params: &ControlParams) -> bool {
    safe_motion(from, to, world, params).is_some()
}

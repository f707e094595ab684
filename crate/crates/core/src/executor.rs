//! Plan execution by sequential composition of local dual-headway policies.
//!
//! Local goals are drawn from the best path, whose tree edges are safe in the
//! start-to-goal direction; a vertex's cost-to-goal is the goal cost minus its
//! cost-to-come. Switches only go to vertices with a strictly smaller
//! cost-to-goal.

use crate::control::{
    closed_loop_step, domain_of, fallback_rotation, in_backward_domain, in_forward_domain, law_for,
    reached, ControlInput, ControlParams, Motion, Pose, Trajectory, TrajectorySample,
};
use crate::error::ExecError;
use crate::geom::Vec2;
use crate::metrics::{weighted, WeightedDistance};
use crate::planner::MotionGraph;
use crate::prediction::safe_motion;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExecParams {
    /// Local-goal re-selection period, seconds.
    pub replan_interval: f64,
    /// Total time budget; `None` uses the larger of `10 cost(goal) / gamma` and
    /// the controller horizon.
    pub horizon: Option<f64>,
}

impl Default for ExecParams {
    fn default() -> Self {
        ExecParams {
            replan_interval: 0.1,
            horizon: None,
        }
    }
}

/// One local-goal segment of an execution.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    /// Graph index of the local goal.
    pub vertex: usize,
    pub cost_to_goal: f64,
    pub start_time: f64,
    pub path_length: f64,
    pub turning: f64,
    /// Entered without a safe candidate, by following the tree edge.
    pub forced: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub trajectory: Trajectory,
    /// Index into `segments` for every trajectory sample.
    pub sample_segment: Vec<usize>,
    pub segments: Vec<Segment>,
    pub forced_handoffs: usize,
}

impl Execution {
    /// Graph vertex index of the local goal active at sample `i`.
    pub fn sample_vertex(&self, i: usize) -> usize {
        self.segments[self.sample_segment[i]].vertex
    }
}

/// Cost-to-goal of every best-path vertex, as `(vertex, cost_to_goal)` in path order.
pub fn path_costs_to_goal(graph: &MotionGraph) -> Result<Vec<(usize, f64)>, ExecError> {
    let goal = graph.goal_index().ok_or(ExecError::NoPlan)?;
    let total = graph.cost_to_come(goal);
    Ok(graph
        .best_path()
        .into_iter()
        .map(|i| (i, total - graph.cost_to_come(i)))
        .collect())
}

/// Minimizer of `c(pose, v) + cost_to_goal(v)` over safely reachable candidates
/// with cost-to-goal below `limit`; ties by lowest graph index.
fn select(
    candidates: &[(usize, f64)],
    graph: &MotionGraph,
    pose: &Pose,
    world: &World,
    control: &ControlParams,
    wd: &WeightedDistance,
    limit: f64,
) -> Option<(usize, f64, f64, Motion)> {
    let mut best: Option<(usize, f64, f64, Motion)> = None;
    for &(v, ctg) in candidates {
        if ctg >= limit {
            continue;
        }
        let target = graph.poses()[v];
        let score = weighted(wd, pose, &target) + ctg;
        let better = best.is_none_or(|(bv, _, bs, _)| score < bs || (score == bs && v < bv));
        if better {
            if let Some(m) = safe_motion(pose, &target, world, control) {
                best = Some((v, ctg, score, m));
            }
        }
    }
    best
}

/// The safely reachable best-path vertex minimizing travel cost to the goal.
pub fn local_goal(
    graph: &MotionGraph,
    pose: &Pose,
    world: &World,
    control: &ControlParams,
    wd: &WeightedDistance,
) -> Result<usize, ExecError> {
    let candidates = path_costs_to_goal(graph)?;
    let goal = graph.goal_index().ok_or(ExecError::NoPlan)?;
    if reached(pose, &graph.poses()[goal], control) {
        return Ok(goal);
    }
    select(&candidates, graph, pose, world, control, wd, f64::INFINITY)
        .map(|(v, ..)| v)
        .ok_or(ExecError::Disconnected)
}

/// Control input of the composed policy at `pose` (zero at the global goal).
pub fn policy_control(
    graph: &MotionGraph,
    pose: &Pose,
    world: &World,
    control: &ControlParams,
    wd: &WeightedDistance,
) -> Result<ControlInput, ExecError> {
    let v = local_goal(graph, pose, world, control, wd)?;
    let target = graph.poses()[v];
    if Some(v) == graph.goal_index() && reached(pose, &target, control) {
        return Ok(ControlInput::ZERO);
    }
    Ok(match domain_of(pose, &target, control) {
        Some(m) => law_for(m)(pose, &target, control),
        None => fallback_rotation(pose, &target, control),
    })
}

struct Active {
    segment: usize,
    target: Pose,
    motion: Option<Motion>,
    ctg: f64,
}

/// Drives `start` to the goal of `graph`.
pub fn execute(
    graph: &MotionGraph,
    start: &Pose,
    world: &World,
    control: &ControlParams,
    wd: &WeightedDistance,
    exec: &ExecParams,
) -> Result<Execution, ExecError> {
    let candidates = path_costs_to_goal(graph)?;
    let goal_idx = graph.goal_index().ok_or(ExecError::NoPlan)?;
    let goal = graph.poses()[goal_idx];
    let mut out = Execution {
        trajectory: Trajectory::default(),
        sample_segment: Vec::new(),
        segments: Vec::new(),
        forced_handoffs: 0,
    };
    if reached(start, &goal, control) {
        out.trajectory.converged = true;
        return Ok(out);
    }
    let horizon = exec
        .horizon
        .unwrap_or_else(|| (10.0 * graph.goal_cost() / control.gamma).max(control.horizon));
    let h = control.step;
    let replan_every = ((exec.replan_interval / h).round() as usize).max(1);
    let steps = (horizon / h).ceil() as usize;

    let path_next = |v: usize| -> Option<(usize, f64)> {
        let k = candidates.iter().position(|&(c, _)| c == v)?;
        candidates.get(k + 1).copied()
    };

    let mut t_index = 0usize;
    let mut pose = *start;
    let (v, ctg, _, m) = select(&candidates, graph, &pose, world, control, wd, f64::INFINITY)
        .ok_or(ExecError::Disconnected)?;
    let begin =
        |out: &mut Execution, v: usize, ctg: f64, m: Option<Motion>, t: f64, forced: bool| {
            out.segments.push(Segment {
                vertex: v,
                cost_to_goal: ctg,
                start_time: t,
                path_length: 0.0,
                turning: 0.0,
                forced,
            });
            if forced {
                out.forced_handoffs += 1;
            }
            Active {
                segment: out.segments.len() - 1,
                target: graph.poses()[v],
                motion: m,
                ctg,
            }
        };
    let mut active = begin(&mut out, v, ctg, Some(m), 0.0, false);

    while t_index < steps {
        let t = t_index as f64 * h;
        if reached(&pose, &goal, control) {
            out.trajectory.converged = true;
            break;
        }
        let at_target = reached(&pose, &active.target, control);
        if at_target || (t_index > 0 && t_index.is_multiple_of(replan_every)) {
            let current_score = if at_target {
                f64::INFINITY
            } else {
                weighted(wd, &pose, &active.target) + active.ctg
            };
            let pick = select(&candidates, graph, &pose, world, control, wd, active.ctg)
                .filter(|&(_, _, score, _)| score < current_score);
            if let Some((v, ctg, _, m)) = pick {
                active = begin(&mut out, v, ctg, Some(m), t, false);
            } else if at_target {
                let (v, ctg) = path_next(out.segments[active.segment].vertex)
                    .ok_or(ExecError::Disconnected)?;
                let m = domain_of(&pose, &graph.poses()[v], control);
                active = begin(&mut out, v, ctg, m, t, true);
            }
        }
        let target = active.target;
        let motion = match active.motion {
            Some(Motion::Forward) if in_forward_domain(&pose, &target, control) => {
                Some(Motion::Forward)
            }
            Some(Motion::Backward) if in_backward_domain(&pose, &target, control) => {
                Some(Motion::Backward)
            }
            _ => domain_of(&pose, &target, control),
        };
        active.motion = motion;
        // integrate relative to the local goal to keep precision near it
        let origin = target.position;
        let local_target = Pose {
            position: Vec2::ZERO,
            theta: target.theta,
        };
        let rel = Pose {
            position: pose.position - origin,
            theta: pose.theta,
        };
        let law = |p: &Pose| match motion {
            Some(m) => law_for(m)(p, &local_target, control),
            None => fallback_rotation(p, &local_target, control),
        };
        let u = law(&rel);
        out.trajectory
            .samples
            .push(TrajectorySample { t, pose, input: u });
        out.sample_segment.push(active.segment);
        let seg = &mut out.segments[active.segment];
        seg.path_length += u.v.abs() * h;
        seg.turning += u.omega.abs() * h;
        out.trajectory.path_length += u.v.abs() * h;
        out.trajectory.turning += u.omega.abs() * h;
        let next = if motion.is_some() {
            closed_loop_step(&rel, h, &law)
        } else {
            crate::control::integrate_step(&rel, u, h)
        };
        pose = Pose {
            position: next.position + origin,
            theta: next.theta,
        };
        t_index += 1;
    }
    out.trajectory.samples.push(TrajectorySample {
        t: t_index as f64 * h,
        pose,
        input: ControlInput::ZERO,
    });
    out.sample_segment.push(active.segment);
    if !out.trajectory.converged && reached(&pose, &goal, control) {
        out.trajectory.converged = true;
    }
    if out.trajectory.converged {
        Ok(out)
    } else {
        Err(ExecError::HorizonExceeded { horizon })
    }
}

//! Optimal rapidly-exploring random tree over unicycle poses.
//!
//! Each iteration runs, in order: goal-biased sample, nearest vertex under the
//! cost distance, projection, safety check, minimum-cost parent selection over
//! the decoupled neighborhood, insertion, and rewiring of that same
//! neighborhood. Every random draw comes from one seeded ChaCha8 stream.

use std::collections::{HashSet, VecDeque};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{ControlParams, Pose};
use crate::error::{GraphError, ScenarioError};
use crate::metrics::{neighbors, project, weighted, DistanceKind, WeightedDistance, DEFAULT_KAPPA};
use crate::prediction::issafe;
use crate::world::{sample_free_pose, Problem, World};

/// Pose distance used as the edge cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    /// Dual-headway translation plus dual-headway orientation.
    #[default]
    Dualhead,
    /// Euclidean translation plus cosine orientation.
    Euclidean,
    /// Euccos translation plus cosine orientation.
    Euccos,
}

impl std::str::FromStr for Objective {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dualhead" => Ok(Objective::Dualhead),
            "euclidean" => Ok(Objective::Euclidean),
            "euccos" => Ok(Objective::Euccos),
            _ => Err(format!(
                "unknown objective `{s}` (dualhead|euclidean|euccos)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostMode {
    #[default]
    Weighted,
    /// Every edge costs 1.
    Uniform,
}

/// Informed sampling and pruning heuristic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Informed {
    #[default]
    Off,
    Zero,
    Euclidean,
}

impl std::str::FromStr for Informed {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "off" => Ok(Informed::Off),
            "zero" => Ok(Informed::Zero),
            "euclidean" => Ok(Informed::Euclidean),
            _ => Err(format!("unknown informed mode `{s}` (off|zero|euclidean)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlannerParams {
    /// Number of iterations.
    pub samples: usize,
    /// Probability of sampling the goal pose.
    pub goal_bias: f64,
    pub seed: u64,
    pub objective: Objective,
    pub alpha: f64,
    pub beta: f64,
    /// Headway/tailway coefficient of the dual-headway distances.
    pub kappa: f64,
    /// Euclidean radius of the neighborhood.
    pub neighbor_dp: f64,
    /// Cosine radius of the neighborhood.
    pub neighbor_dtheta: f64,
    /// Euclidean projection step.
    pub step_dp: f64,
    /// Cosine projection step.
    pub step_dtheta: f64,
    pub informed: Informed,
    pub cost: CostMode,
}

impl Default for PlannerParams {
    fn default() -> Self {
        PlannerParams {
            samples: 3000,
            goal_bias: 0.05,
            seed: 0,
            objective: Objective::Dualhead,
            alpha: 1.0,
            beta: 10.0,
            kappa: DEFAULT_KAPPA,
            neighbor_dp: 1.5,
            neighbor_dtheta: 1.0 - (std::f64::consts::PI / 3.0).cos(),
            step_dp: 1.0,
            step_dtheta: 1.0 - (std::f64::consts::PI / 6.0).cos(),
            informed: Informed::Off,
            cost: CostMode::Weighted,
        }
    }
}

impl PlannerParams {
    pub fn validate(&self) -> Result<(), ScenarioError> {
        if !(0.0..=1.0).contains(&self.goal_bias) {
            return Err(ScenarioError::invalid(
                "planner.goal_bias",
                "must lie in [0, 1]",
            ));
        }
        if !(self.neighbor_dp >= 0.0 && self.neighbor_dp.is_finite()) {
            return Err(ScenarioError::invalid(
                "planner.neighbor_dp",
                "must be nonnegative",
            ));
        }
        if !(0.0..=2.0).contains(&self.neighbor_dtheta) {
            return Err(ScenarioError::invalid(
                "planner.neighbor_dtheta",
                "must lie in [0, 2]",
            ));
        }
        if !(self.step_dp > 0.0 && self.step_dp.is_finite()) {
            return Err(ScenarioError::invalid(
                "planner.step_dp",
                "must be positive",
            ));
        }
        if !(self.step_dtheta > 0.0 && self.step_dtheta <= 2.0) {
            return Err(ScenarioError::invalid(
                "planner.step_dtheta",
                "must lie in (0, 2]",
            ));
        }
        self.cost_distance()
            .map(|_| ())
            .map_err(|e| ScenarioError::invalid("planner.alpha", e.to_string()))
    }

    /// The weighted distance selected by `objective`, `alpha`, `beta` and `kappa`.
    pub fn cost_distance(&self) -> Result<WeightedDistance, crate::error::MetricError> {
        match self.objective {
            Objective::Dualhead => WeightedDistance::dualhead(self.alpha, self.beta, self.kappa),
            Objective::Euclidean => WeightedDistance::euclidean_cosine(self.alpha, self.beta),
            Objective::Euccos => WeightedDistance::new(
                self.alpha,
                self.beta,
                DistanceKind::Euccos,
                DistanceKind::Cosine,
            ),
        }
    }
}

/// Edge cost between two poses.
pub fn local_cost(p: &Pose, q: &Pose, wd: &WeightedDistance, mode: CostMode) -> f64 {
    match mode {
        CostMode::Weighted => weighted(wd, p, q),
        CostMode::Uniform => 1.0,
    }
}

/// Admissible cost-to-go estimate.
pub fn heuristic(p: &Pose, q: &Pose, wd: &WeightedDistance, mode: Informed) -> f64 {
    match mode {
        Informed::Off | Informed::Zero => 0.0,
        Informed::Euclidean => wd.alpha * p.position.distance(q.position),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Vertex {
    pub pose: Pose,
    pub parent: Option<usize>,
    /// Cost of the edge from the parent (0 for the root).
    pub edge_cost: f64,
    pub cost_to_come: f64,
    children: Vec<usize>,
}

/// A tree of poses rooted at vertex 0; the edge set is given by parent links.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionGraph {
    vertices: Vec<Vertex>,
    poses: Vec<Pose>,
    goal: Option<usize>,
}

fn pose_key(p: &Pose) -> (u64, u64, u64) {
    (
        p.position.x.to_bits(),
        p.position.y.to_bits(),
        p.theta.to_bits(),
    )
}

impl MotionGraph {
    pub fn new(start: Pose) -> Self {
        MotionGraph {
            vertices: vec![Vertex {
                pose: start,
                parent: None,
                edge_cost: 0.0,
                cost_to_come: 0.0,
                children: Vec::new(),
            }],
            poses: vec![start],
            goal: None,
        }
    }

    /// Rebuilds a tree from an edge list (edges are undirected; orientation is
    /// recovered by breadth-first search from vertex 0).
    pub fn from_edges(
        poses: Vec<Pose>,
        edges: &[(usize, usize, f64)],
        goal: Option<usize>,
    ) -> Result<Self, GraphError> {
        let n = poses.len();
        if n == 0 {
            return Err(GraphError::Malformed("no vertices".into()));
        }
        if edges.len() + 1 != n {
            return Err(GraphError::Malformed(format!(
                "{n} vertices need {} tree edges, got {}",
                n - 1,
                edges.len()
            )));
        }
        let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(a, b, c) in edges {
            if a >= n || b >= n || a == b {
                return Err(GraphError::Malformed(format!("bad edge ({a}, {b})")));
            }
            if !(c > 0.0 && c.is_finite()) {
                return Err(GraphError::Malformed(format!("edge ({a}, {b}) cost {c}")));
            }
            adj[a].push((b, c));
            adj[b].push((a, c));
        }
        let mut g = MotionGraph::new(poses[0]);
        g.vertices.reserve(n - 1);
        let mut index = vec![usize::MAX; n];
        index[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(u) = queue.pop_front() {
            for &(w, c) in &adj[u] {
                if index[w] == usize::MAX {
                    index[w] = g.push(poses[w], index[u], c);
                    queue.push_back(w);
                }
            }
        }
        if g.len() != n {
            return Err(GraphError::Malformed(
                "edges do not connect every vertex".into(),
            ));
        }
        // restore the caller's vertex numbering
        g.goal = goal.map(|gi| index[gi]);
        g.reorder(&index);
        Ok(g)
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertex(&self, i: usize) -> &Vertex {
        &self.vertices[i]
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn poses(&self) -> &[Pose] {
        &self.poses
    }

    pub fn start(&self) -> Pose {
        self.poses[0]
    }

    pub fn goal_index(&self) -> Option<usize> {
        self.goal
    }

    pub fn cost_to_come(&self, i: usize) -> f64 {
        self.vertices[i].cost_to_come
    }

    /// Cost of the best path to the goal, infinite while the goal is absent.
    pub fn goal_cost(&self) -> f64 {
        self.goal
            .map_or(f64::INFINITY, |g| self.vertices[g].cost_to_come)
    }

    /// Tree edges as `(parent, child, cost)`, ordered by child index.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        self.vertices
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.parent.map(|p| (p, i, v.edge_cost)))
            .collect()
    }

    /// Vertex indices from the start to `target`.
    pub fn path_to(&self, target: usize) -> Result<Vec<usize>, GraphError> {
        if target >= self.len() {
            return Err(GraphError::Unreachable(target));
        }
        let mut path = vec![target];
        let mut cur = target;
        while let Some(p) = self.vertices[cur].parent {
            path.push(p);
            cur = p;
            if path.len() > self.len() {
                return Err(GraphError::Malformed("parent cycle".into()));
            }
        }
        if cur != 0 {
            return Err(GraphError::Unreachable(target));
        }
        path.reverse();
        Ok(path)
    }

    /// Indices of the current best path, empty while the goal is absent.
    pub fn best_path(&self) -> Vec<usize> {
        self.goal
            .and_then(|g| self.path_to(g).ok())
            .unwrap_or_default()
    }

    fn push(&mut self, pose: Pose, parent: usize, edge_cost: f64) -> usize {
        let i = self.vertices.len();
        let cost_to_come = self.vertices[parent].cost_to_come + edge_cost;
        self.vertices.push(Vertex {
            pose,
            parent: Some(parent),
            edge_cost,
            cost_to_come,
            children: Vec::new(),
        });
        self.poses.push(pose);
        self.vertices[parent].children.push(i);
        i
    }

    /// Moves `child` under `new_parent` and propagates the cost change down
    /// its subtree.
    fn reparent(&mut self, child: usize, new_parent: usize, edge_cost: f64) {
        if let Some(old) = self.vertices[child].parent {
            self.vertices[old].children.retain(|&c| c != child);
        }
        self.vertices[new_parent].children.push(child);
        let v = &mut self.vertices[child];
        v.parent = Some(new_parent);
        v.edge_cost = edge_cost;
        let mut stack = vec![child];
        while let Some(u) = stack.pop() {
            let parent_cost = self.vertices[u]
                .parent
                .map_or(0.0, |p| self.vertices[p].cost_to_come);
            let v = &mut self.vertices[u];
            v.cost_to_come = parent_cost + v.edge_cost;
            stack.extend_from_slice(&self.vertices[u].children);
        }
    }

    /// Keeps the listed old indices, in order, and renumbers everything.
    fn reorder(&mut self, keep: &[usize]) {
        let mut map = vec![usize::MAX; self.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let vertices: Vec<Vertex> = keep
            .iter()
            .map(|&old| {
                let v = &self.vertices[old];
                Vertex {
                    pose: v.pose,
                    parent: v.parent.map(|p| map[p]),
                    edge_cost: v.edge_cost,
                    cost_to_come: v.cost_to_come,
                    children: v
                        .children
                        .iter()
                        .map(|&c| map[c])
                        .filter(|&c| c != usize::MAX)
                        .collect(),
                }
            })
            .collect();
        self.poses = vertices.iter().map(|v| v.pose).collect();
        self.vertices = vertices;
        self.goal = self.goal.map(|g| map[g]).filter(|&g| g != usize::MAX);
    }

    /// Removes every vertex whose cost-to-come plus heuristic exceeds the goal
    /// cost, together with its subtree. Start and best-path vertices are kept.
    /// Returns `(removed, protected)` where `protected` counts best-path
    /// vertices that failed the bound.
    pub fn prune(&mut self, wd: &WeightedDistance, mode: Informed) -> (usize, usize) {
        let Some(goal) = self.goal else {
            return (0, 0);
        };
        let bound = self.goal_cost();
        let goal_pose = self.poses[goal];
        let mut on_path = vec![false; self.len()];
        for i in self.best_path() {
            on_path[i] = true;
        }
        let mut protected = 0;
        let mut remove = vec![false; self.len()];
        let mut any = false;
        for i in 0..self.len() {
            if self.vertices[i].cost_to_come + heuristic(&self.poses[i], &goal_pose, wd, mode)
                > bound
            {
                if on_path[i] {
                    protected += 1;
                } else if i != 0 {
                    remove[i] = true;
                    any = true;
                }
            }
        }
        if !any {
            return (0, protected);
        }
        // descendants of pruned vertices go too; parents precede children in a
        // depth-first walk from the root
        let mut stack = vec![0usize];
        let mut keep = Vec::with_capacity(self.len());
        while let Some(u) = stack.pop() {
            if remove[u] {
                continue;
            }
            keep.push(u);
            stack.extend(self.vertices[u].children.iter().rev());
        }
        keep.sort_unstable();
        let removed = self.len() - keep.len();
        self.reorder(&keep);
        (removed, protected)
    }
}

/// Vertex sequence from the start to `goal`.
pub fn extract_path(graph: &MotionGraph, goal: &Pose) -> Result<Vec<Pose>, GraphError> {
    let idx = graph
        .poses()
        .iter()
        .position(|p| p == goal)
        .ok_or(GraphError::GoalAbsent)?;
    Ok(graph
        .path_to(idx)?
        .into_iter()
        .map(|i| graph.poses()[i])
        .collect())
}

/// Per-iteration bookkeeping of one planning run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanStats {
    /// Goal cost after each iteration (infinite until connected).
    pub goal_cost: Vec<f64>,
    /// Cumulative number of inserted vertices after each iteration.
    pub accepted: Vec<usize>,
    pub informed_rejections: usize,
    pub pruned: usize,
    /// Best-path vertices that failed the pruning bound (kept regardless).
    pub path_bound_violations: usize,
    /// Times a pruning pass changed the goal cost or broke the best path.
    pub path_breaks: usize,
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub graph: MotionGraph,
    pub stats: PlanStats,
}

/// Incremental planner state; one [`Planner::step`] is one iteration.
pub struct Planner<'a> {
    world: &'a World,
    goal: Pose,
    params: &'a PlannerParams,
    control: &'a ControlParams,
    wd: WeightedDistance,
    rng: ChaCha8Rng,
    graph: MotionGraph,
    seen: HashSet<(u64, u64, u64)>,
    inserted: usize,
    pub stats: PlanStats,
}

impl<'a> Planner<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        Self::with_seed(problem, problem.planner.seed)
    }

    pub fn with_seed(problem: &'a Problem, seed: u64) -> Self {
        let wd = problem
            .planner
            .cost_distance()
            .expect("validated planner parameters");
        let graph = MotionGraph::new(problem.start);
        let mut seen = HashSet::new();
        seen.insert(pose_key(&problem.start));
        let mut planner = Planner {
            world: &problem.world,
            goal: problem.goal,
            params: &problem.planner,
            control: &problem.control,
            wd,
            rng: ChaCha8Rng::seed_from_u64(seed),
            graph,
            seen,
            inserted: 0,
            stats: PlanStats::default(),
        };
        if problem.start == problem.goal {
            planner.graph.goal = Some(0);
        }
        planner
    }

    pub fn graph(&self) -> &MotionGraph {
        &self.graph
    }

    fn cost(&self, p: &Pose, q: &Pose) -> f64 {
        local_cost(p, q, &self.wd, self.params.cost)
    }

    /// Nearest vertex under the cost distance, ignoring vertices at the
    /// sample's exact position (no controller joins co-located poses).
    fn nearest(&self, sample: &Pose) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, q) in self.graph.poses.iter().enumerate() {
            if q.position == sample.position {
                continue;
            }
            let d = weighted(&self.wd, q, sample);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        best.map(|(i, _)| i)
    }

    /// Runs one iteration.
    pub fn step(&mut self) {
        self.iterate();
        self.stats.goal_cost.push(self.graph.goal_cost());
        self.stats.accepted.push(self.inserted);
    }

    fn iterate(&mut self) {
        let bias = if self.graph.goal.is_some() {
            0.0
        } else {
            self.params.goal_bias
        };
        let Ok(rand_pose) = sample_free_pose(self.world, &mut self.rng, &self.goal, bias) else {
            return;
        };
        let Some(best) = self.nearest(&rand_pose) else {
            return;
        };
        let best_pose = self.graph.poses[best];
        let new = project(
            &best_pose,
            &rand_pose,
            self.params.step_dp,
            self.params.step_dtheta,
        );
        if self.seen.contains(&pose_key(&new))
            || !issafe(&best_pose, &new, self.world, self.control)
        {
            return;
        }
        let c = self.cost(&best_pose, &new);
        if c.is_nan() || c <= 0.0 {
            return;
        }
        let mut p_min = best;
        let mut min_cost = self.graph.cost_to_come(best) + c;
        let mut min_edge = c;
        let near = neighbors(
            self.graph.poses(),
            &new,
            self.params.neighbor_dp,
            self.params.neighbor_dtheta,
            DistanceKind::Euclidean,
            DistanceKind::Cosine,
        );
        for &j in &near {
            let pj = self.graph.poses[j];
            let edge = self.cost(&pj, &new);
            let temp = self.graph.cost_to_come(j) + edge;
            if edge > 0.0 && temp < min_cost && issafe(&pj, &new, self.world, self.control) {
                p_min = j;
                min_cost = temp;
                min_edge = edge;
            }
        }
        if self.params.informed != Informed::Off && self.graph.goal.is_some() {
            let h = heuristic(&new, &self.goal, &self.wd, self.params.informed);
            if min_cost + h > self.graph.goal_cost() {
                self.stats.informed_rejections += 1;
                return;
            }
        }
        let new_idx = self.graph.push(new, p_min, min_edge);
        self.seen.insert(pose_key(&new));
        self.inserted += 1;
        if new == self.goal {
            self.graph.goal = Some(new_idx);
        }
        for &j in &near {
            let pj = self.graph.poses[j];
            let edge = self.cost(&new, &pj);
            let temp = self.graph.cost_to_come(new_idx) + edge;
            if edge > 0.0
                && temp < self.graph.cost_to_come(j)
                && issafe(&new, &pj, self.world, self.control)
            {
                self.graph.reparent(j, new_idx, edge);
            }
        }
        if self.params.informed != Informed::Off {
            self.prune();
        }
    }

    fn prune(&mut self) {
        let before_cost = self.graph.goal_cost();
        let before_path: Vec<Pose> = self
            .graph
            .best_path()
            .iter()
            .map(|&i| self.graph.poses[i])
            .collect();
        let (removed, protected) = self.graph.prune(&self.wd, self.params.informed);
        self.stats.pruned += removed;
        self.stats.path_bound_violations += protected;
        if removed > 0 {
            self.seen = self.graph.poses.iter().map(pose_key).collect();
            let after_path: Vec<Pose> = self
                .graph
                .best_path()
                .iter()
                .map(|&i| self.graph.poses[i])
                .collect();
            if after_path != before_path || self.graph.goal_cost() != before_cost {
                self.stats.path_breaks += 1;
            }
        }
    }

    pub fn finish(self) -> PlanResult {
        PlanResult {
            graph: self.graph,
            stats: self.stats,
        }
    }
}

/// Runs all iterations of the planner with the problem's seed.
pub fn plan(problem: &Problem) -> PlanResult {
    plan_with_seed(problem, problem.planner.seed)
}

pub fn plan_with_seed(problem: &Problem, seed: u64) -> PlanResult {
    let mut planner = Planner::with_seed(problem, seed);
    for _ in 0..problem.planner.samples {
        planner.step();
    }
    planner.finish()
}

pub fn build_tree(problem: &Problem) -> MotionGraph {
    plan(problem).graph
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Ball, Shape, Vec2};
    use crate::world::{Workspace, World};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use std::cmp::Ordering;
    use std::collections::BinaryHeap;
    use std::f64::consts::PI;

    fn problem(planner: PlannerParams) -> Problem {
        let world = World::empty(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0), 0.2).unwrap();
        Problem::new(
            world,
            Pose::new(1.0, 5.0, 0.0),
            Pose::new(9.0, 5.0, 0.0),
            planner,
            ControlParams::default(),
        )
        .unwrap()
    }

    fn cluttered(planner: PlannerParams) -> Problem {
        let world = World::new(
            Workspace::new(Vec2::new(0.0, 0.0), Vec2::new(10.0, 10.0)).unwrap(),
            vec![
                Shape::Ball(Ball::new(Vec2::new(5.0, 5.0), 1.5).unwrap()),
                Shape::Ball(Ball::new(Vec2::new(3.0, 8.0), 1.0).unwrap()),
            ],
            0.2,
        )
        .unwrap();
        Problem::new(
            world,
            Pose::new(1.0, 5.0, 0.0),
            Pose::new(9.0, 5.0, 0.0),
            planner,
            ControlParams::default(),
        )
        .unwrap()
    }

    fn check_costs(g: &MotionGraph) {
        assert_eq!(g.cost_to_come(0), 0.0);
        for (i, v) in g.vertices().iter().enumerate().skip(1) {
            let p = v.parent.expect("non-root has a parent");
            assert!(v.edge_cost > 0.0);
            let expect = g.cost_to_come(p) + v.edge_cost;
            assert!(
                (v.cost_to_come - expect).abs() <= 1e-9 * expect.max(1.0),
                "vertex {i}"
            );
        }
    }

    #[test]
    fn local_cost_examples() {
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        let a = Pose::new(0.0, 0.0, 0.0);
        let b = Pose::new(1.0, 0.0, 0.0);
        assert!((local_cost(&a, &b, &wd, CostMode::Weighted) - 1.0).abs() < 1e-12);
        let euc =
            WeightedDistance::new(1.0, 0.0, DistanceKind::Euclidean, DistanceKind::Cosine).unwrap();
        let c = Pose::new(3.0, 4.0, 1.0);
        assert_eq!(local_cost(&a, &c, &euc, CostMode::Weighted), 5.0);
        assert_eq!(local_cost(&a, &c, &wd, CostMode::Uniform), 1.0);
    }

    #[test]
    fn heuristic_examples() {
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        let a = Pose::new(0.0, 0.0, 0.0);
        let b = Pose::new(1.0, 0.0, 0.0);
        assert_eq!(heuristic(&a, &b, &wd, Informed::Zero), 0.0);
        assert_eq!(heuristic(&a, &b, &wd, Informed::Euclidean), 1.0);
    }

    #[test]
    fn heuristic_is_admissible() {
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..100_000 {
            let a = Pose::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-PI..PI),
            );
            let b = Pose::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-PI..PI),
            );
            let h = heuristic(&a, &b, &wd, Informed::Euclidean);
            assert!(h <= local_cost(&a, &b, &wd, CostMode::Weighted) + 1e-12);
        }
    }

    #[test]
    fn zero_samples_gives_the_start_alone() {
        let r = plan(&problem(PlannerParams {
            samples: 0,
            ..PlannerParams::default()
        }));
        assert_eq!(r.graph.len(), 1);
        assert!(r.graph.edges().is_empty());
        assert_eq!(r.graph.goal_index(), None);
    }

    #[test]
    fn single_goal_sample_connects_directly() {
        let mut pr = problem(PlannerParams {
            samples: 1,
            goal_bias: 1.0,
            step_dp: 10.0,
            ..PlannerParams::default()
        });
        pr.goal = Pose::new(3.0, 5.0, 0.0);
        let r = plan(&pr);
        let wd = pr.planner.cost_distance().unwrap();
        assert_eq!(r.graph.len(), 2);
        assert_eq!(r.graph.goal_index(), Some(1));
        let expect = local_cost(&pr.start, &pr.goal, &wd, CostMode::Weighted);
        assert!((r.graph.goal_cost() - expect).abs() < 1e-12);
        assert_eq!(
            extract_path(&r.graph, &pr.goal).unwrap(),
            vec![pr.start, pr.goal]
        );
    }

    #[test]
    fn start_as_goal_has_zero_cost_path() {
        let mut pr = problem(PlannerParams {
            samples: 0,
            ..PlannerParams::default()
        });
        pr.goal = pr.start;
        let g = build_tree(&pr);
        assert_eq!(extract_path(&g, &pr.start).unwrap(), vec![pr.start]);
        assert_eq!(g.goal_cost(), 0.0);
    }

    #[test]
    fn missing_goal_is_an_error() {
        let g = MotionGraph::new(Pose::new(0.0, 0.0, 0.0));
        assert_eq!(
            extract_path(&g, &Pose::new(1.0, 0.0, 0.0)),
            Err(GraphError::GoalAbsent)
        );
    }

    #[test]
    fn planning_is_deterministic() {
        let pr = cluttered(PlannerParams {
            samples: 400,
            seed: 11,
            ..PlannerParams::default()
        });
        let a = plan(&pr);
        let b = plan(&pr);
        assert_eq!(a.graph, b.graph);
        assert_eq!(a.stats, b.stats);
        assert_ne!(plan_with_seed(&pr, 12).graph, a.graph);
    }

    #[test]
    fn tree_invariants_hold_every_iteration() {
        let pr = cluttered(PlannerParams {
            samples: 600,
            seed: 3,
            ..PlannerParams::default()
        });
        let mut planner = Planner::new(&pr);
        let mut last = f64::INFINITY;
        for _ in 0..pr.planner.samples {
            planner.step();
            check_costs(planner.graph());
            let now = planner.graph().goal_cost();
            assert!(now <= last);
            last = now;
        }
        let g = planner.finish().graph;
        for (p, c, _) in g.edges() {
            assert!(issafe(&g.poses()[p], &g.poses()[c], &pr.world, &pr.control));
        }
    }

    #[derive(PartialEq)]
    struct Entry(f64, usize);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
            Some(self.cmp(o))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, o: &Self) -> Ordering {
            o.0.total_cmp(&self.0).then(o.1.cmp(&self.1))
        }
    }

    fn dijkstra(n: usize, edges: &[(usize, usize, f64)]) -> Vec<f64> {
        let mut adj = vec![Vec::new(); n];
        for &(a, b, c) in edges {
            adj[a].push((b, c));
            adj[b].push((a, c));
        }
        let mut dist = vec![f64::INFINITY; n];
        dist[0] = 0.0;
        let mut heap = BinaryHeap::from([Entry(0.0, 0)]);
        while let Some(Entry(d, u)) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(w, c) in &adj[u] {
                if d + c < dist[w] {
                    dist[w] = d + c;
                    heap.push(Entry(d + c, w));
                }
            }
        }
        dist
    }

    #[test]
    fn path_cost_matches_dijkstra() {
        for seed in 0..3 {
            let g = plan_with_seed(
                &cluttered(PlannerParams {
                    samples: 500,
                    ..PlannerParams::default()
                }),
                seed,
            )
            .graph;
            let dist = dijkstra(g.len(), &g.edges());
            for (i, &d) in dist.iter().enumerate() {
                let path = g.path_to(i).unwrap();
                let sum: f64 = path.windows(2).map(|w| g.vertex(w[1]).edge_cost).sum();
                assert!((sum - d).abs() < 1e-9);
                assert!((g.cost_to_come(i) - d).abs() < 1e-9);
            }
        }
    }

    fn chain(costs: &[f64]) -> MotionGraph {
        let mut g = MotionGraph::new(Pose::new(0.0, 0.0, 0.0));
        for (i, &c) in costs.iter().enumerate() {
            g.push(Pose::new(i as f64 + 1.0, 0.0, 0.0), i, c);
        }
        g
    }

    #[test]
    fn prune_without_goal_is_a_no_op() {
        let mut g = chain(&[1.0, 1.0]);
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        let before = g.clone();
        assert_eq!(g.prune(&wd, Informed::Euclidean), (0, 0));
        assert_eq!(g, before);
    }

    #[test]
    fn prune_removes_hopeless_subtrees() {
        // start -> a (goal, cost 12); start -> b (cost 10, 5 from goal) -> c
        let mut g = MotionGraph::new(Pose::new(0.0, 0.0, 0.0));
        let goal = g.push(Pose::new(12.0, 0.0, 0.0), 0, 12.0);
        let b = g.push(Pose::new(12.0, 5.0, 0.0), 0, 10.0);
        g.push(Pose::new(12.0, 6.0, 0.0), b, 1.0);
        g.goal = Some(goal);
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        assert_eq!(g.prune(&wd, Informed::Euclidean), (2, 0));
        assert_eq!(g.len(), 2);
        assert_eq!(g.goal_index(), Some(1));
        assert_eq!(g.goal_cost(), 12.0);
    }

    #[test]
    fn prune_keeps_the_best_path() {
        let mut g = chain(&[1.0, 1.0, 1.0]);
        g.goal = Some(3);
        let wd = WeightedDistance::dualhead(1.0, 10.0, DEFAULT_KAPPA).unwrap();
        assert_eq!(g.prune(&wd, Informed::Euclidean), (0, 0));
        assert_eq!(g.best_path(), vec![0, 1, 2, 3]);
    }

    #[test]
    fn informed_runs_respect_the_bound() {
        for mode in [Informed::Zero, Informed::Euclidean] {
            let pr = cluttered(PlannerParams {
                samples: 800,
                seed: 4,
                informed: mode,
                ..PlannerParams::default()
            });
            let mut planner = Planner::new(&pr);
            for _ in 0..pr.planner.samples {
                planner.step();
                check_costs(planner.graph());
            }
            let r = planner.finish();
            assert_eq!(r.stats.path_bound_violations, 0);
            assert_eq!(r.stats.path_breaks, 0);
            let best = r.graph.goal_cost();
            let wd = pr.planner.cost_distance().unwrap();
            for (i, p) in r.graph.poses().iter().enumerate() {
                assert!(r.graph.cost_to_come(i) + heuristic(p, &pr.goal, &wd, mode) <= best + 1e-9);
            }
        }
    }

    #[test]
    fn dump_round_trip_preserves_the_tree() {
        let g = plan(&cluttered(PlannerParams {
            samples: 300,
            ..PlannerParams::default()
        }))
        .graph;
        let h = MotionGraph::from_edges(g.poses().to_vec(), &g.edges(), g.goal_index()).unwrap();
        assert_eq!(h.poses(), g.poses());
        assert_eq!(h.goal_index(), g.goal_index());
        assert_eq!(h.edges().len(), g.edges().len());
        for i in 0..g.len() {
            assert_eq!(h.vertex(i).parent, g.vertex(i).parent);
            assert!((h.cost_to_come(i) - g.cost_to_come(i)).abs() < 1e-9);
        }
    }

    #[test]
    fn malformed_edge_lists_are_rejected() {
        let poses = vec![
            Pose::new(0.0, 0.0, 0.0),
            Pose::new(1.0, 0.0, 0.0),
            Pose::new(2.0, 0.0, 0.0),
        ];
        assert!(MotionGraph::from_edges(poses.clone(), &[(0, 1, 1.0)], None).is_err());
        assert!(MotionGraph::from_edges(poses.clone(), &[(0, 1, 1.0), (0, 1, 1.0)], None).is_err());
        assert!(
            MotionGraph::from_edges(poses.clone(), &[(0, 1, 1.0), (1, 2, -1.0)], None).is_err()
        );
        assert!(MotionGraph::from_edges(poses, &[(0, 1, 1.0), (1, 5, 1.0)], None).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn reparenting_keeps_costs_consistent(
            costs in prop::collection::vec(0.1f64..5.0, 2..20),
            moves in prop::collection::vec((0usize..20, 0.1f64..5.0), 1..20),
        ) {
            let mut g = chain(&costs);
            for &(j, c) in &moves {
                let child = 1 + j % (g.len() - 1);
                // a new leaf under the root is never a descendant of `child`
                let leaf = g.push(Pose::new(-(g.len() as f64), 1.0, 0.0), 0, 0.5);
                g.reparent(child, leaf, c);
                check_costs(&g);
            }
            let dist = dijkstra(g.len(), &g.edges());
            for (i, d) in dist.iter().enumerate() {
                prop_assert!((g.cost_to_come(i) - d).abs() < 1e-9);
            }
        }
    }
}

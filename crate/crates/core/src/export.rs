//! Graph dumps, trajectory CSV and SVG rendering.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::control::{ControlParams, Pose, Trajectory};
use crate::error::GraphError;
use crate::geom::{Shape, Vec2};
use crate::planner::MotionGraph;
use crate::prediction::{motion_bound, safe_motion};
use crate::world::{Problem, ScenarioFile, World};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpVertex {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DumpEdge {
    pub a: usize,
    pub b: usize,
    pub cost: f64,
}

/// Serialized motion graph; the last best-path entry is the goal vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDump {
    pub seed: u64,
    pub scenario: ScenarioFile,
    pub vertices: Vec<DumpVertex>,
    pub edges: Vec<DumpEdge>,
    pub best_path: Vec<usize>,
}

impl GraphDump {
    pub fn new(graph: &MotionGraph, problem: &Problem, seed: u64) -> Self {
        GraphDump {
            seed,
            scenario: problem.to_scenario_file(),
            vertices: graph
                .vertices()
                .iter()
                .map(|v| DumpVertex {
                    x: v.pose.position.x,
                    y: v.pose.position.y,
                    theta: v.pose.theta,
                    cost: v.cost_to_come,
                })
                .collect(),
            edges: graph
                .edges()
                .into_iter()
                .map(|(a, b, cost)| DumpEdge { a, b, cost })
                .collect(),
            best_path: graph.best_path(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("dump serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, GraphError> {
        serde_json::from_str(text).map_err(|e| GraphError::Malformed(e.to_string()))
    }

    pub fn to_graph(&self) -> Result<MotionGraph, GraphError> {
        let poses: Vec<Pose> = self
            .vertices
            .iter()
            .map(|v| Pose::new(v.x, v.y, v.theta))
            .collect();
        let edges: Vec<(usize, usize, f64)> =
            self.edges.iter().map(|e| (e.a, e.b, e.cost)).collect();
        let graph = MotionGraph::from_edges(poses, &edges, self.best_path.last().copied())?;
        if graph.best_path() != self.best_path {
            return Err(GraphError::Malformed(
                "best_path does not follow the tree".into(),
            ));
        }
        Ok(graph)
    }
}

/// `%.{digits}g`-style formatting.
pub fn format_g(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let p = digits.max(1);
    let sci = format!("{:.*e}", p - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= p as i32 {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (p as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x)).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn g12(x: f64) -> String {
    format_g(x, 12)
}

/// `t,x,y,theta,v,omega` rows; with `segments`, a trailing `segment` column.
pub fn trajectory_csv(traj: &Trajectory, segments: Option<&[usize]>) -> String {
    let mut out = String::from("t,x,y,theta,v,omega");
    if segments.is_some() {
        out.push_str(",segment");
    }
    out.push('\n');
    for (i, s) in traj.samples.iter().enumerate() {
        let _ = write!(
            out,
            "{},{},{},{},{},{}",
            g12(s.t),
            g12(s.pose.position.x),
            g12(s.pose.position.y),
            g12(s.pose.theta),
            g12(s.input.v),
            g12(s.input.omega)
        );
        if let Some(seg) = segments {
            let _ = write!(out, ",{}", seg[i]);
        }
        out.push('\n');
    }
    out
}

/// `index,x,y,theta,cost` rows of the best path.
pub fn path_csv(graph: &MotionGraph) -> String {
    let mut out = String::from("index,x,y,theta,cost\n");
    for i in graph.best_path() {
        let v = graph.vertex(i);
        let _ = writeln!(
            out,
            "{i},{},{},{},{}",
            g12(v.pose.position.x),
            g12(v.pose.position.y),
            g12(v.pose.theta),
            g12(v.cost_to_come)
        );
    }
    out
}

fn pts(points: impl IntoIterator<Item = Vec2>) -> String {
    points
        .into_iter()
        .map(|p| format!("{},{}", g12(p.x), g12(p.y)))
        .collect::<Vec<_>>()
        .join(" ")
}

fn pose_triangle(p: &Pose, size: f64) -> String {
    let o = p.heading();
    let n = o.perp();
    let tip = p.position + o * size;
    let left = p.position - o * (0.5 * size) + n * (0.4 * size);
    let right = p.position - o * (0.5 * size) - n * (0.4 * size);
    pts([tip, left, right])
}

/// What to draw on top of the world.
#[derive(Debug, Default, Clone, Copy)]
pub struct SvgLayers<'a> {
    pub graph: Option<&'a MotionGraph>,
    pub trajectory: Option<&'a Trajectory>,
    /// Controller coefficients for prediction hulls along the best path.
    pub hulls: Option<&'a ControlParams>,
    pub start: Option<Pose>,
    pub goal: Option<Pose>,
}

/// Renders the world and layers; the y axis points up.
pub fn render_svg(world: &World, layers: &SvgLayers) -> String {
    let ws = world.workspace;
    let size = ws.max - ws.min;
    let unit = size.x.max(size.y);
    let scale = 800.0 / unit;
    let stroke = unit / 400.0;
    let tri = unit / 80.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        g12(size.x * scale),
        g12(size.y * scale),
        g12(ws.min.x),
        g12(-ws.max.y),
        g12(size.x),
        g12(size.y)
    );
    let _ = writeln!(
        s,
        r#"<g transform="scale(1,-1)" stroke-width="{}">"#,
        g12(stroke)
    );
    let _ = writeln!(
        s,
        r#"<rect class="workspace" x="{}" y="{}" width="{}" height="{}" fill="white" stroke="black"/>"#,
        g12(ws.min.x),
        g12(ws.min.y),
        g12(size.x),
        g12(size.y)
    );
    for o in &world.obstacles {
        match o {
            Shape::Polygon(p) => {
                let _ = writeln!(
                    s,
                    r#"<polygon class="obstacle" points="{}" fill="gray"/>"#,
                    pts(p.vertices().iter().copied())
                );
            }
            Shape::Ball(b) => {
                let _ = writeln!(
                    s,
                    r#"<circle class="obstacle" cx="{}" cy="{}" r="{}" fill="gray"/>"#,
                    g12(b.center.x),
                    g12(b.center.y),
                    g12(b.radius)
                );
            }
        }
    }
    if let Some(g) = layers.graph {
        let path = g.best_path();
        if let Some(control) = layers.hulls {
            for w in path.windows(2) {
                let (a, b) = (g.poses()[w[0]], g.poses()[w[1]]);
                let bound = safe_motion(&a, &b, world, control)
                    .and_then(|m| motion_bound(&a, &b, control, m).ok());
                if let Some(bound) = bound {
                    let _ = writeln!(
                        s,
                        r#"<polygon class="hull" points="{}" fill="lightblue" fill-opacity="0.4" stroke="none"/>"#,
                        pts(bound.hull.vertices().iter().copied())
                    );
                }
            }
        }
        for (a, b, _) in g.edges() {
            let (p, q) = (g.poses()[a].position, g.poses()[b].position);
            let _ = writeln!(
                s,
                r#"<line class="edge" x1="{}" y1="{}" x2="{}" y2="{}" stroke="silver"/>"#,
                g12(p.x),
                g12(p.y),
                g12(q.x),
                g12(q.y)
            );
        }
        if path.len() > 1 {
            let _ = writeln!(
                s,
                r#"<polyline class="path" points="{}" fill="none" stroke="blue"/>"#,
                pts(path.iter().map(|&i| g.poses()[i].position))
            );
        }
        for p in g.poses() {
            let _ = writeln!(
                s,
                r#"<polygon class="vertex" points="{}" fill="black"/>"#,
                pose_triangle(p, tri)
            );
        }
    }
    if let Some(t) = layers.trajectory {
        if !t.samples.is_empty() {
            let _ = writeln!(
                s,
                r#"<polyline class="trajectory" points="{}" fill="none" stroke="red"/>"#,
                pts(t
                    .samples
                    .iter()
                    .step_by(10)
                    .chain(t.samples.last())
                    .map(|x| x.pose.position))
            );
        }
    }
    for (class, pose, colour) in [
        ("start", layers.start, "green"),
        ("goal", layers.goal, "orange"),
    ] {
        if let Some(p) = pose {
            let _ = writeln!(
                s,
                r#"<polygon class="{class}" points="{}" fill="{colour}"/>"#,
                pose_triangle(&p, 2.0 * tri)
            );
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}

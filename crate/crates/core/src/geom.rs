//! Planar primitives: vectors, heading frames, small convex hulls and
//! separation distances between convex sets.

use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeomError;

/// A point or displacement in the plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    /// Unit vector pointing along heading `theta`.
    pub fn heading(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Vec2::new(c, s)
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn distance(self, other: Vec2) -> f64 {
        (self - other).norm()
    }

    /// Counterclockwise rotation by a quarter turn.
    pub fn perp(self) -> Self {
        Vec2::new(-self.y, self.x)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl AddAssign for Vec2 {
    fn add_assign(&mut self, rhs: Vec2) {
        self.x += rhs.x;
        self.y += rhs.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, rhs: Vec2) -> Vec2 {
        Vec2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

/// Wraps an angle into `[-pi, pi)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let wrapped = (theta + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid can round up to exactly 2*pi for inputs just below a multiple of it.
    if wrapped >= PI {
        wrapped - 2.0 * PI
    } else {
        wrapped
    }
}

/// Forward heading `o(theta)` and its left normal `n(theta)`.
///
/// The normal is `o` rotated by +90 degrees, so that `det[o n] = 1`.
pub fn heading_vectors(theta: f64) -> (Vec2, Vec2) {
    let o = Vec2::heading(theta);
    (o, o.perp())
}

/// A closed disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: Vec2,
    pub radius: f64,
}

impl Ball {
    pub fn new(center: Vec2, radius: f64) -> Result<Self, GeomError> {
        if radius < 0.0 || !radius.is_finite() || !center.is_finite() {
            return Err(GeomError::InvalidBall { radius });
        }
        Ok(Ball { center, radius })
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        p.distance(self.center) <= self.radius + tol
    }
}

/// A convex polygon with counterclockwise vertices.
///
/// Degenerate hulls are allowed: two vertices describe a segment and a single
/// vertex a point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvexPolygon {
    vertices: Vec<Vec2>,
}

impl ConvexPolygon {
    /// Builds the polygon from vertices forming a convex loop in either
    /// orientation. Collinear and repeated vertices are dropped.
    pub fn from_convex_vertices(vertices: &[Vec2]) -> Result<Self, GeomError> {
        if vertices.is_empty() {
            return Err(GeomError::EmptyPointSet);
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite);
        }
        let n = vertices.len();
        if n >= 3 {
            let mut sign = 0.0;
            for i in 0..n {
                let a = vertices[i];
                let b = vertices[(i + 1) % n];
                let c = vertices[(i + 2) % n];
                let turn = (b - a).cross(c - b);
                if turn.abs() <= 1e-12 {
                    continue;
                }
                if sign == 0.0 {
                    sign = turn.signum();
                } else if turn.signum() != sign {
                    return Err(GeomError::NotConvex);
                }
            }
        }
        let hull = convex_hull(vertices)?;
        // A self-intersecting star has consistent turns but winds more than once.
        if n >= 3 && (signed_area(vertices).abs() - signed_area(&hull.vertices)).abs() > 1e-9 {
            return Err(GeomError::NotConvex);
        }
        Ok(hull)
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Boundary pieces as segments; a point hull yields one zero-length segment.
    pub fn edges(&self) -> impl Iterator<Item = (Vec2, Vec2)> + '_ {
        let n = self.vertices.len();
        let count = match n {
            1 => 1,
            2 => 1,
            _ => n,
        };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// True iff `p` is inside or within `tol` of the boundary.
    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        hull_contains(self, p, tol)
    }

    /// Euclidean distance from `p` to the polygon (0 inside).
    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        if self.vertices.len() >= 3 && self.contains(p, 0.0) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| point_segment_distance(p, a, b))
            .fold(f64::INFINITY, f64::min)
    }
}

fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

/// Minimal counterclockwise convex polygon containing `points`.
///
/// Monotone chain; collinear and duplicate points are removed.
pub fn convex_hull(points: &[Vec2]) -> Result<ConvexPolygon, GeomError> {
    if points.is_empty() {
        return Err(GeomError::EmptyPointSet);
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeomError::NonFinite);
    }
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 2 {
        return Ok(ConvexPolygon { vertices: pts });
    }

    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &Vec2>> = if pass == 0 {
            Box::new(pts.iter())
        } else {
            Box::new(pts.iter().rev())
        };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - a) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        // The last point of each chain starts the next one.
        hull.pop();
    }
    if hull.len() < 2 {
        // All points were collinear: keep the extreme pair.
        hull = vec![pts[0], *pts.last().expect("nonempty")];
    }
    Ok(ConvexPolygon { vertices: hull })
}

/// True iff `p` lies inside `poly` or within `tol` of its boundary.
///
/// For proper polygons this is a signed-distance test against every edge
/// half-plane; segments and points use the plain Euclidean distance.
pub fn hull_contains(poly: &ConvexPolygon, p: Vec2, tol: f64) -> bool {
    let v = poly.vertices();
    match v.len() {
        0 => false,
        1 => p.distance(v[0]) <= tol,
        2 => point_segment_distance(p, v[0], v[1]) <= tol,
        n => (0..n).all(|i| {
            let a = v[i];
            let b = v[(i + 1) % n];
            let edge = b - a;
            edge.cross(p - a) / edge.norm() >= -tol
        }),
    }
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return p.distance(a);
    }
    let t = ((p - a).dot(ab) / len2).clamp(0.0, 1.0);
    p.distance(a + ab * t)
}

fn orientation(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(p: Vec2, a: Vec2, b: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

fn segments_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> bool {
    let d1 = orientation(c, d, a);
    let d2 = orientation(c, d, b);
    let d3 = orientation(a, b, c);
    let d4 = orientation(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(a, c, d))
        || (d2 == 0.0 && on_segment(b, c, d))
        || (d3 == 0.0 && on_segment(c, a, b))
        || (d4 == 0.0 && on_segment(d, a, b))
}

fn segment_segment_distance(a: Vec2, b: Vec2, c: Vec2, d: Vec2) -> f64 {
    if segments_intersect(a, b, c, d) {
        return 0.0;
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Minimum distance between two convex polygons, 0 if they intersect.
pub fn polygon_separation(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    if a.len() >= 3 && b.vertices().iter().any(|&p| a.contains(p, 0.0)) {
        return 0.0;
    }
    if b.len() >= 3 && a.vertices().iter().any(|&p| b.contains(p, 0.0)) {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for (p, q) in a.edges() {
        for (r, s) in b.edges() {
            best = best.min(segment_segment_distance(p, q, r, s));
            if best == 0.0 {
                return 0.0;
            }
        }
    }
    best
}

/// Minimum distance between a convex polygon and a disk, 0 if they intersect.
pub fn ball_separation(a: &ConvexPolygon, ball: &Ball) -> f64 {
    (a.distance_to_point(ball.center) - ball.radius).max(0.0)
}

/// A convex obstacle or query region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Shape {
    Polygon(ConvexPolygon),
    Ball(Ball),
}

impl Shape {
    pub fn separation(&self, other: &Shape) -> f64 {
        match (self, other) {
            (Shape::Polygon(a), Shape::Polygon(b)) => polygon_separation(a, b),
            (Shape::Polygon(a), Shape::Ball(b)) | (Shape::Ball(b), Shape::Polygon(a)) => {
                ball_separation(a, b)
            }
            (Shape::Ball(a), Shape::Ball(b)) => {
                (a.center.distance(b.center) - a.radius - b.radius).max(0.0)
            }
        }
    }

    /// Distance from a point to the shape (0 inside).
    pub fn distance_to_point(&self, p: Vec2) -> f64 {
        match self {
            Shape::Polygon(poly) => poly.distance_to_point(p),
            Shape::Ball(b) => (p.distance(b.center) - b.radius).max(0.0),
        }
    }
}

/// Separation between a polygon and a polygon-or-ball obstacle.
pub fn separation(poly: &ConvexPolygon, obstacle: &Shape) -> f64 {
    match obstacle {
        Shape::Polygon(b) => polygon_separation(poly, b),
        Shape::Ball(b) => ball_separation(poly, b),
    }
}

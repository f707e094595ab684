//! Unicycle pose distances, neighborhoods and local-steering projection.

use serde::{Deserialize, Serialize};

use crate::control::Pose;
use crate::error::MetricError;
use crate::geom::{wrap_angle, Vec2};

/// Default shared headway/tailway coefficient for pose distances.
pub const DEFAULT_KAPPA: f64 = 1.0 / 3.0;

/// A single pose distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DistanceKind {
    /// `|x - x'|`
    Euclidean,
    /// `1 - o(theta) . o(theta')`
    Cosine,
    /// `|x - x'| (2 - o(theta) . o(theta'))`
    Euccos,
    /// Shortest path through the headway/tailway points of both poses.
    DualheadTrans { kappa: f64 },
    /// Dual-headway translation distance per unit of straight-line distance, minus one.
    DualheadOrient { kappa: f64 },
    /// Shortest headway-to-tailway gap between the two poses.
    Headtail { kappa: f64 },
    /// Absolute angle between headings, in `[0, pi]`.
    Geodesic,
}

impl DistanceKind {
    pub fn kappa(&self) -> Option<f64> {
        match *self {
            DistanceKind::DualheadTrans { kappa }
            | DistanceKind::DualheadOrient { kappa }
            | DistanceKind::Headtail { kappa } => Some(kappa),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        match self.kappa() {
            Some(k) if !(k > 0.0 && k < 0.5) => Err(MetricError::InvalidKappa(k)),
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DistanceKind::Euclidean => "euclidean",
            DistanceKind::Cosine => "cosine",
            DistanceKind::Euccos => "euccos",
            DistanceKind::DualheadTrans { .. } => "dualhead_trans",
            DistanceKind::DualheadOrient { .. } => "dualhead_orient",
            DistanceKind::Headtail { .. } => "headtail",
            DistanceKind::Geodesic => "geodesic",
        }
    }
}

/// `alpha * trans + beta * orient`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedDistance {
    pub alpha: f64,
    pub beta: f64,
    pub trans: DistanceKind,
    pub orient: DistanceKind,
}

impl WeightedDistance {
    pub fn new(
        alpha: f64,
        beta: f64,
        trans: DistanceKind,
        orient: DistanceKind,
    ) -> Result<Self, MetricError> {
        if !(alpha >= 0.0 && beta >= 0.0) || (alpha == 0.0 && beta == 0.0) {
            return Err(MetricError::InvalidWeights { alpha, beta });
        }
        trans.validate()?;
        orient.validate()?;
        Ok(WeightedDistance {
            alpha,
            beta,
            trans,
            orient,
        })
    }

    /// Dual-headway translation plus orientation.
    pub fn dualhead(alpha: f64, beta: f64, kappa: f64) -> Result<Self, MetricError> {
        Self::new(
            alpha,
            beta,
            DistanceKind::DualheadTrans { kappa },
            DistanceKind::DualheadOrient { kappa },
        )
    }

    /// Euclidean translation plus cosine orientation.
    pub fn euclidean_cosine(alpha: f64, beta: f64) -> Result<Self, MetricError> {
        Self::new(alpha, beta, DistanceKind::Euclidean, DistanceKind::Cosine)
    }

    pub fn eval(&self, p: &Pose, q: &Pose) -> f64 {
        weighted(self, p, q)
    }
}

/// Headway and tailway points of both poses with the shared coefficient
/// `kappa` and lever `kappa |x - x'|`: `(head_p, tail_p, head_q, tail_q)`.
pub fn kappa_anchors(p: &Pose, q: &Pose, kappa: f64) -> (Vec2, Vec2, Vec2, Vec2) {
    let lever = kappa * p.position.distance(q.position);
    let op = p.heading() * lever;
    let oq = q.heading() * lever;
    (
        p.position + op,
        p.position - op,
        q.position + oq,
        q.position - oq,
    )
}

/// Orientation mismatch factor `min |u + s kappa (o + o')|` over `s = +-1`,
/// with `u` the unit vector from `q` to `p`. Requires distinct positions.
fn mismatch(p: &Pose, q: &Pose, kappa: f64) -> f64 {
    let diff = p.position - q.position;
    let u = diff * (1.0 / diff.norm());
    let sum = (p.heading() + q.heading()) * kappa;
    (u + sum).norm().min((u - sum).norm())
}

/// Evaluates one distance kind.
pub fn distance(kind: DistanceKind, p: &Pose, q: &Pose) -> f64 {
    let dist = p.position.distance(q.position);
    let cos = p.heading().dot(q.heading());
    match kind {
        DistanceKind::Euclidean => dist,
        DistanceKind::Cosine => 1.0 - cos,
        DistanceKind::Euccos => dist * (2.0 - cos),
        DistanceKind::DualheadTrans { kappa } => {
            if dist == 0.0 {
                0.0
            } else {
                dist * (2.0 * kappa + mismatch(p, q, kappa))
            }
        }
        DistanceKind::DualheadOrient { kappa } => {
            if dist == 0.0 {
                2.0 * kappa - kappa * (p.heading() + q.heading()).norm()
            } else {
                mismatch(p, q, kappa) - 1.0 + 2.0 * kappa
            }
        }
        DistanceKind::Headtail { kappa } => {
            if dist == 0.0 {
                0.0
            } else {
                dist * mismatch(p, q, kappa)
            }
        }
        DistanceKind::Geodesic => wrap_angle(q.theta - p.theta).abs(),
    }
}

pub fn weighted(wd: &WeightedDistance, p: &Pose, q: &Pose) -> f64 {
    let mut total = 0.0;
    if wd.alpha != 0.0 {
        total += wd.alpha * distance(wd.trans, p, q);
    }
    if wd.beta != 0.0 {
        total += wd.beta * distance(wd.orient, p, q);
    }
    total
}

/// Index of the pose nearest to `p`; ties go to the lowest index.
pub fn nearest_index(set: &[Pose], p: &Pose, wd: &WeightedDistance) -> Result<usize, MetricError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, q) in set.iter().enumerate() {
        let d = weighted(wd, q, p);
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((i, d));
        }
    }
    best.map(|(i, _)| i).ok_or(MetricError::EmptySet)
}

pub fn nearest(set: &[Pose], p: &Pose, wd: &WeightedDistance) -> Result<Pose, MetricError> {
    nearest_index(set, p, wd).map(|i| set[i])
}

/// Decoupled neighborhood: indices with translation distance `<= dp` and
/// orientation distance `<= dtheta`.
pub fn neighbors(
    set: &[Pose],
    p: &Pose,
    dp: f64,
    dtheta: f64,
    trans: DistanceKind,
    orient: DistanceKind,
) -> Vec<usize> {
    set.iter()
        .enumerate()
        .filter(|(_, q)| distance(trans, q, p) <= dp && distance(orient, q, p) <= dtheta)
        .map(|(i, _)| i)
        .collect()
}

/// Coupled neighborhood: indices within weighted distance `dr`.
pub fn neighbors_coupled(set: &[Pose], p: &Pose, dr: f64, wd: &WeightedDistance) -> Vec<usize> {
    set.iter()
        .enumerate()
        .filter(|(_, q)| weighted(wd, q, p) <= dr)
        .map(|(i, _)| i)
        .collect()
}

/// The `k` closest indices by weighted distance, ties by index.
pub fn k_nearest(set: &[Pose], p: &Pose, k: usize, wd: &WeightedDistance) -> Vec<usize> {
    let mut scored: Vec<(f64, usize)> = set
        .iter()
        .enumerate()
        .map(|(i, q)| (weighted(wd, q, p), i))
        .collect();
    // stable sort keeps index order among equal distances
    scored.sort_by(|a, b| a.0.total_cmp(&b.0));
    scored.into_iter().take(k).map(|(_, i)| i).collect()
}

/// Projects `toward` onto the Euclidean/cosine neighborhood of `from`.
///
/// Position moves at most `dp`; the heading moves to the closest angle whose
/// cosine distance from `from.theta` is at most `dtheta`.
pub fn project(from: &Pose, toward: &Pose, dp: f64, dtheta: f64) -> Pose {
    let delta = toward.position - from.position;
    let dist = delta.norm();
    let position = if dist <= dp {
        toward.position
    } else {
        from.position + delta * (dp / dist)
    };
    let theta = if 1.0 - from.heading().dot(toward.heading()) <= dtheta {
        toward.theta
    } else {
        let reach = (1.0 - dtheta).clamp(-1.0, 1.0).acos();
        let plus = from.theta + reach;
        let minus = from.theta - reach;
        let target = toward.heading();
        if Vec2::heading(plus).dot(target) >= Vec2::heading(minus).dot(target) {
            plus
        } else {
            minus
        }
    };
    Pose::from_parts(position, theta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

    const K: f64 = DEFAULT_KAPPA;

    fn trans() -> DistanceKind {
        DistanceKind::DualheadTrans { kappa: K }
    }
    fn orient() -> DistanceKind {
        DistanceKind::DualheadOrient { kappa: K }
    }

    /// Enumerates the two three-segment paths through the anchor points.
    fn explicit_two_path(p: &Pose, q: &Pose, kappa: f64) -> f64 {
        let (hp, tp, hq, tq) = kappa_anchors(p, q, kappa);
        let via_head = p.position.distance(hp) + hp.distance(tq) + tq.distance(q.position);
        let via_tail = p.position.distance(tp) + tp.distance(hq) + hq.distance(q.position);
        via_head.min(via_tail)
    }

    #[test]
    fn kappa_anchor_examples() {
        let (hp, tp, hq, tq) =
            kappa_anchors(&Pose::new(0.0, 0.0, 0.0), &Pose::new(1.0, 0.0, 0.0), K);
        let close = |a: Vec2, x: f64, y: f64| (a - Vec2::new(x, y)).norm() < 1e-15;
        assert!(close(hp, 1.0 / 3.0, 0.0) && close(tp, -1.0 / 3.0, 0.0));
        assert!(close(hq, 4.0 / 3.0, 0.0) && close(tq, 2.0 / 3.0, 0.0));
        let p = Pose::new(1.0, 2.0, 0.7);
        let (a, b, c, d) = kappa_anchors(&p, &Pose::new(1.0, 2.0, -0.1), K);
        assert!([a, b, c, d].iter().all(|&v| v == p.position));
        let (_, _, hq, _) = kappa_anchors(
            &Pose::new(0.0, 0.0, 0.0),
            &Pose::new(1.0, 0.0, FRAC_PI_2),
            K,
        );
        assert!(close(hq, 1.0, 1.0 / 3.0));
    }

    #[test]
    fn table_distance_examples() {
        let p = Pose::new(0.0, 0.0, 0.0);
        let aligned = Pose::new(1.0, 0.0, 0.0);
        assert!((distance(trans(), &p, &aligned) - 1.0).abs() < 1e-15);
        assert!(distance(orient(), &p, &aligned).abs() < 1e-15);

        let perp = Pose::new(1.0, 0.0, FRAC_PI_2);
        let root5 = 5f64.sqrt();
        assert!((distance(trans(), &p, &perp) - (2.0 + root5) / 3.0).abs() < 1e-15);
        assert!((distance(orient(), &p, &perp) - (root5 - 1.0) / 3.0).abs() < 1e-15);
        assert!((distance(DistanceKind::Cosine, &p, &perp) - 1.0).abs() < 1e-15);
        assert!((distance(DistanceKind::Euccos, &p, &perp) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn colocated_poses_use_the_otherwise_clause() {
        let p = Pose::new(1.0, 1.0, 0.0);
        let q = Pose::new(1.0, 1.0, FRAC_PI_2);
        assert_eq!(distance(trans(), &p, &q), 0.0);
        assert_eq!(distance(DistanceKind::Headtail { kappa: K }, &p, &q), 0.0);
        let expected = 2.0 * K - K * 2f64.sqrt();
        assert!((distance(orient(), &p, &q) - expected).abs() < 1e-15);
    }

    #[test]
    fn weighted_examples() {
        let p = Pose::new(0.0, 0.0, 0.0);
        let q = Pose::new(1.0, 0.0, FRAC_PI_2);
        let only_trans = WeightedDistance::dualhead(1.0, 0.0, K).unwrap();
        assert_eq!(weighted(&only_trans, &p, &q), distance(trans(), &p, &q));
        let only_orient = WeightedDistance::dualhead(0.0, 1.0, K).unwrap();
        assert_eq!(weighted(&only_orient, &p, &q), distance(orient(), &p, &q));
        let wd = WeightedDistance::dualhead(1.0, 10.0, K).unwrap();
        let root5 = 5f64.sqrt();
        let expected = (2.0 + root5) / 3.0 + 10.0 * (root5 - 1.0) / 3.0;
        assert!((weighted(&wd, &p, &q) - expected).abs() < 1e-13);
        assert!((weighted(&wd, &p, &q) - 5.53225).abs() < 1e-5);
        assert!(WeightedDistance::dualhead(0.0, 0.0, K).is_err());
        assert!(WeightedDistance::dualhead(1.0, -1.0, K).is_err());
        assert!(WeightedDistance::dualhead(1.0, 1.0, 0.5).is_err());
    }

    #[test]
    fn nearest_examples() {
        let wd = WeightedDistance::euclidean_cosine(1.0, 1.0).unwrap();
        let only = Pose::new(3.0, 3.0, 1.0);
        assert_eq!(
            nearest(&[only], &Pose::new(0.0, 0.0, 0.0), &wd).unwrap(),
            only
        );
        let a = Pose::new(1.0, 0.0, 0.0);
        let b = Pose::new(-1.0, 0.0, 0.0);
        assert_eq!(
            nearest_index(&[a, b], &Pose::new(0.0, 0.0, 0.0), &wd).unwrap(),
            0
        );
        assert_eq!(nearest(&[], &a, &wd), Err(MetricError::EmptySet));
    }

    #[test]
    fn neighbor_examples() {
        let set: Vec<Pose> = (0..10)
            .map(|i| Pose::new(i as f64, 0.0, i as f64 * 0.3))
            .collect();
        let p = Pose::new(0.0, 0.0, 0.0);
        let all = neighbors(
            &set,
            &p,
            f64::INFINITY,
            f64::INFINITY,
            DistanceKind::Euclidean,
            DistanceKind::Cosine,
        );
        assert_eq!(all, (0..10).collect::<Vec<_>>());
        let colocated = neighbors(
            &set,
            &p,
            0.0,
            0.1,
            DistanceKind::Euclidean,
            DistanceKind::Cosine,
        );
        assert_eq!(colocated, vec![0]);
    }

    #[test]
    fn k_nearest_breaks_ties_by_index() {
        let wd = WeightedDistance::euclidean_cosine(1.0, 0.0).unwrap();
        let set = [
            Pose::new(1.0, 0.0, 0.0),
            Pose::new(-1.0, 0.0, 0.0),
            Pose::new(0.5, 0.0, 0.0),
        ];
        assert_eq!(
            k_nearest(&set, &Pose::new(0.0, 0.0, 0.0), 2, &wd),
            vec![2, 0]
        );
        assert_eq!(k_nearest(&set, &Pose::new(0.0, 0.0, 0.0), 10, &wd).len(), 3);
    }

    #[test]
    fn projection_examples() {
        let from = Pose::new(0.0, 0.0, 0.0);
        let out = project(&from, &Pose::new(3.0, 0.0, 0.0), 1.0, 0.1);
        assert!((out.position - Vec2::new(1.0, 0.0)).norm() < 1e-15);
        let inside = Pose::new(0.5, 0.2, 0.1);
        assert_eq!(project(&from, &inside, 1.0, 0.1), inside);
        let out = project(
            &from,
            &Pose::new(0.0, 0.0, FRAC_PI_2),
            1.0,
            1.0 - FRAC_PI_6.cos(),
        );
        assert!((out.theta - FRAC_PI_6).abs() < 1e-12);
        let out = project(
            &from,
            &Pose::new(0.0, 0.0, -FRAC_PI_2),
            1.0,
            1.0 - FRAC_PI_6.cos(),
        );
        assert!((out.theta + FRAC_PI_6).abs() < 1e-12);
    }

    fn arb_pose() -> impl Strategy<Value = Pose> {
        (-5.0..5.0f64, -5.0..5.0f64, -PI..PI).prop_map(|(x, y, t)| Pose::new(x, y, t))
    }

    const ALL_KINDS: [DistanceKind; 7] = [
        DistanceKind::Euclidean,
        DistanceKind::Cosine,
        DistanceKind::Euccos,
        DistanceKind::DualheadTrans { kappa: K },
        DistanceKind::DualheadOrient { kappa: K },
        DistanceKind::Headtail { kappa: K },
        DistanceKind::Geodesic,
    ];

    proptest! {
        #[test]
        fn distances_are_symmetric(p in arb_pose(), q in arb_pose()) {
            for kind in ALL_KINDS {
                let a = distance(kind, &p, &q);
                let b = distance(kind, &q, &p);
                prop_assert!((a - b).abs() < 1e-12, "{:?}: {} vs {}", kind, a, b);
            }
        }

        #[test]
        fn dualhead_matches_explicit_paths(p in arb_pose(), q in arb_pose(), kappa in 0.01..0.49f64) {
            let closed = distance(DistanceKind::DualheadTrans { kappa }, &p, &q);
            let paths = explicit_two_path(&p, &q, kappa);
            prop_assert!((closed - paths).abs() < 1e-12 * (1.0 + paths));
        }

        #[test]
        fn range_bounds(p in arb_pose(), q in arb_pose()) {
            let dist = p.position.distance(q.position);
            let euccos = distance(DistanceKind::Euccos, &p, &q);
            prop_assert!(dist <= euccos + 1e-12 && euccos <= 3.0 * dist + 1e-12);
            let ratio = distance(trans(), &p, &q) / dist;
            prop_assert!((1.0 - 1e-12..=1.0 + 4.0 * K + 1e-12).contains(&ratio));
            let o = distance(orient(), &p, &q);
            prop_assert!((-1e-12..=4.0 * K + 1e-12).contains(&o));
            let ht = distance(DistanceKind::Headtail { kappa: K }, &p, &q) / dist;
            prop_assert!((1.0 - 2.0 * K - 1e-12..=1.0 + 2.0 * K + 1e-12).contains(&ht));
            // the head-tail gap and the orientation distance differ by a constant
            prop_assert!((ht - 1.0 + 2.0 * K - o).abs() < 1e-12);
        }

        #[test]
        fn nearest_matches_scan(set in prop::collection::vec(arb_pose(), 1..100), p in arb_pose()) {
            let wd = WeightedDistance::dualhead(1.0, 10.0, K).unwrap();
            let idx = nearest_index(&set, &p, &wd).unwrap();
            let best = set.iter().map(|q| weighted(&wd, q, &p)).fold(f64::INFINITY, f64::min);
            prop_assert_eq!(weighted(&wd, &set[idx], &p), best);
            let first = set.iter().position(|q| weighted(&wd, q, &p) == best).unwrap();
            prop_assert_eq!(idx, first);
        }

        #[test]
        fn coupled_contains_decoupled(
            set in prop::collection::vec(arb_pose(), 1..60),
            p in arb_pose(),
            dp in 0.0..4.0f64,
            dtheta in 0.0..2.0f64,
            alpha in 0.0..3.0f64,
            beta in 0.1..3.0f64,
        ) {
            let wd = WeightedDistance::euclidean_cosine(alpha, beta).unwrap();
            let decoupled = neighbors(&set, &p, dp, dtheta, DistanceKind::Euclidean, DistanceKind::Cosine);
            let brute: Vec<usize> = (0..set.len())
                .filter(|&i| set[i].position.distance(p.position) <= dp
                    && 1.0 - set[i].heading().dot(p.heading()) <= dtheta)
                .collect();
            prop_assert_eq!(&decoupled, &brute);
            let coupled = neighbors_coupled(&set, &p, alpha * dp + beta * dtheta + 1e-12, &wd);
            prop_assert!(decoupled.iter().all(|i| coupled.contains(i)));
        }

        #[test]
        fn projection_heading_is_optimal(from in arb_pose(), toward in arb_pose(), dtheta in 0.01..1.99f64) {
            let out = project(&from, &toward, 1.0, dtheta);
            let within = |t: f64| 1.0 - Vec2::heading(t).dot(from.heading()) <= dtheta + 1e-12;
            prop_assert!(within(out.theta));
            let achieved = 1.0 - out.heading().dot(toward.heading());
            for i in 0..10_000 {
                let t = -PI + 2.0 * PI * i as f64 / 10_000.0;
                if within(t) {
                    prop_assert!(achieved <= 1.0 - Vec2::heading(t).dot(toward.heading()) + 1e-9);
                }
            }
        }

        #[test]
        fn euclidean_lower_bounds_dualhead(p in arb_pose(), q in arb_pose()) {
            prop_assert!(p.position.distance(q.position) <= distance(trans(), &p, &q) + 1e-12);
        }
    }
}

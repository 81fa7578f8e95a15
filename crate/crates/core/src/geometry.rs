//! Planar geometry used by the peeling loop: monotone-chain convex hull,
//! Welzl smallest enclosing circle, centroid and nearest-candidate queries.
//!
//! All coordinates are meters. Comparisons use an absolute tolerance of
//! [`GEOM_EPS`], which leaves plenty of headroom for areas of a few hundred
//! meters on a side.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance for geometric predicates, in meters (or m² for areas).
pub const GEOM_EPS: f64 = 1e-9;

/// Seed for the Welzl permutation when the caller does not supply one.
pub const DEFAULT_SEC_SEED: u64 = 0x5eed_5ec0;

// Slack used inside Welzl's containment test. Kept well below GEOM_EPS so the
// returned radius stays within GEOM_EPS of the true minimum.
const SEC_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    /// Checked constructor rejecting NaN and infinite coordinates.
    pub fn try_new(x: f64, y: f64) -> Result<Self> {
        if x.is_finite() && y.is_finite() {
            Ok(Point2 { x, y })
        } else {
            Err(Error::InvalidParameter(format!(
                "non-finite coordinate ({x}, {y})"
            )))
        }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn distance_sq(&self, other: &Point2) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    fn lex_cmp(&self, other: &Point2) -> std::cmp::Ordering {
        self.x
            .total_cmp(&other.x)
            .then_with(|| self.y.total_cmp(&other.y))
    }
}

/// A 3D position: horizontal coordinates plus altitude above ground.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub h: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, h: f64) -> Self {
        Point3 { x, y, h }
    }

    pub fn ground(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: Point2,
    pub radius: f64,
}

impl Circle {
    pub fn new(center: Point2, radius: f64) -> Self {
        debug_assert!(radius >= 0.0);
        Circle { center, radius }
    }

    /// True when `p` is inside or on the circle, up to [`GEOM_EPS`].
    pub fn contains(&self, p: &Point2) -> bool {
        self.center.distance(p) <= self.radius + GEOM_EPS
    }

    fn contains_strict(&self, p: &Point2) -> bool {
        self.center.distance(p) <= self.radius + SEC_SLACK
    }
}

/// Twice the signed area of triangle (o, a, b); positive for a left turn.
pub fn cross(o: &Point2, a: &Point2, b: &Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Convex hull by Andrew's monotone chain.
///
/// Vertices come back counter-clockwise, starting at the lexicographically
/// smallest point. Collinear boundary points are dropped and duplicates are
/// merged, so inputs with at most two distinct points return those points.
pub fn convex_hull(points: &[Point2]) -> Result<Vec<Point2>> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sorted = points.to_vec();
    sorted.sort_by(Point2::lex_cmp);
    sorted.dedup();
    if sorted.len() <= 2 {
        return Ok(sorted);
    }

    let mut hull: Vec<Point2> = Vec::with_capacity(sorted.len() + 1);
    for p in &sorted {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= GEOM_EPS
        {
            hull.pop();
        }
        hull.push(*p);
    }
    let lower_len = hull.len() + 1;
    for p in sorted.iter().rev().skip(1) {
        while hull.len() >= lower_len
            && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) <= GEOM_EPS
        {
            hull.pop();
        }
        hull.push(*p);
    }
    // last point repeats the first
    hull.pop();
    Ok(hull)
}

/// Index of the hull vertices within `points`: for every hull vertex, the
/// lowest index in `points` holding that coordinate. Same order as
/// [`convex_hull`].
pub fn convex_hull_indices(points: &[Point2]) -> Result<Vec<usize>> {
    let hull = convex_hull(points)?;
    Ok(hull
        .iter()
        .map(|v| {
            points
                .iter()
                .position(|p| p == v)
                .expect("hull vertex is an input point")
        })
        .collect())
}

/// Smallest enclosing circle with the default permutation seed.
pub fn smallest_enclosing_circle(points: &[Point2]) -> Result<Circle> {
    smallest_enclosing_circle_seeded(points, DEFAULT_SEC_SEED)
}

/// Welzl's smallest enclosing circle (iterative form, expected linear time).
///
/// The input is visited in a pseudorandom order drawn from `seed`, so the
/// same points in the same order always produce a bit-identical circle.
pub fn smallest_enclosing_circle_seeded(points: &[Point2], seed: u64) -> Result<Circle> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut shuffled = points.to_vec();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    shuffled.shuffle(&mut rng);

    let mut circle: Option<Circle> = None;
    for (i, p) in shuffled.iter().enumerate() {
        if circle.is_none_or(|c| !c.contains_strict(p)) {
            circle = Some(circle_with_one_point(&shuffled[..i], *p));
        }
    }
    Ok(circle.expect("non-empty input"))
}

// One boundary point known.
fn circle_with_one_point(points: &[Point2], p: Point2) -> Circle {
    let mut c = Circle::new(p, 0.0);
    for (i, q) in points.iter().enumerate() {
        if !c.contains_strict(q) {
            c = if c.radius == 0.0 {
                diameter_circle(&p, q)
            } else {
                circle_with_two_points(&points[..i + 1], p, *q)
            };
        }
    }
    c
}

// Two boundary points known.
fn circle_with_two_points(points: &[Point2], p: Point2, q: Point2) -> Circle {
    let circ = diameter_circle(&p, &q);
    let mut left: Option<Circle> = None;
    let mut right: Option<Circle> = None;

    for r in points {
        if circ.contains_strict(r) {
            continue;
        }
        let side = cross(&p, &q, r);
        let Some(c) = circumcircle(&p, &q, r) else {
            continue;
        };
        let offset = cross(&p, &q, &c.center);
        if side > 0.0 {
            if left.is_none_or(|l| offset > cross(&p, &q, &l.center)) {
                left = Some(c);
            }
        } else if side < 0.0 && right.is_none_or(|rc| offset < cross(&p, &q, &rc.center)) {
            right = Some(c);
        }
    }

    match (left, right) {
        (None, None) => circ,
        (Some(l), None) => l,
        (None, Some(r)) => r,
        (Some(l), Some(r)) => {
            if l.radius <= r.radius {
                l
            } else {
                r
            }
        }
    }
}

/// Circle having segment `a`–`b` as its diameter.
pub fn diameter_circle(a: &Point2, b: &Point2) -> Circle {
    let center = Point2::new((a.x + b.x) / 2.0, (a.y + b.y) / 2.0);
    let radius = center.distance(a).max(center.distance(b));
    Circle::new(center, radius)
}

/// Circle through three points, or `None` when they are collinear.
pub fn circumcircle(a: &Point2, b: &Point2, c: &Point2) -> Option<Circle> {
    // translate to the bounding-box center for precision
    let ox = (a.x.min(b.x).min(c.x) + a.x.max(b.x).max(c.x)) / 2.0;
    let oy = (a.y.min(b.y).min(c.y) + a.y.max(b.y).max(c.y)) / 2.0;
    let (ax, ay) = (a.x - ox, a.y - oy);
    let (bx, by) = (b.x - ox, b.y - oy);
    let (cx, cy) = (c.x - ox, c.y - oy);
    let d = (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by)) * 2.0;
    if d == 0.0 {
        return None;
    }
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let x = ox + (a2 * (by - cy) + b2 * (cy - ay) + c2 * (ay - by)) / d;
    let y = oy + (a2 * (cx - bx) + b2 * (ax - cx) + c2 * (bx - ax)) / d;
    let center = Point2::new(x, y);
    let radius = center
        .distance(a)
        .max(center.distance(b))
        .max(center.distance(c));
    Some(Circle::new(center, radius))
}

/// Index of the candidate closest to `reference`; ties go to the lowest index.
pub fn nearest_unserved(reference: &Point2, candidates: &[Point2]) -> Result<usize> {
    nearest_of(reference, candidates.iter().copied().enumerate()).ok_or(Error::NoCandidates)
}

/// Key of the closest `(key, point)` pair; the first one wins a tie.
pub fn nearest_of<K, I>(reference: &Point2, candidates: I) -> Option<K>
where
    I: IntoIterator<Item = (K, Point2)>,
{
    let mut best: Option<(K, f64)> = None;
    for (key, c) in candidates {
        let d = reference.distance_sq(&c);
        if best.as_ref().is_none_or(|(_, bd)| d < *bd) {
            best = Some((key, d));
        }
    }
    best.map(|(k, _)| k)
}

pub fn centroid(points: &[Point2]) -> Result<Point2> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
    Ok(Point2::new(sx / n, sy / n))
}

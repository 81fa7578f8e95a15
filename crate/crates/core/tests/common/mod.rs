#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use uav_scope::Point2;

pub fn random_points(rng: &mut ChaCha8Rng, n: usize, side: f64) -> Vec<Point2> {
    (0..n)
        .map(|_| Point2::new(rng.random_range(0.0..side), rng.random_range(0.0..side)))
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn orient(o: Point2, a: Point2, b: Point2) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Hull vertices by brute force: a point is a vertex when some edge through
/// it has every other point strictly on one side, and it is not interior to
/// any segment between two other points on that supporting line.
pub fn brute_hull_vertices(points: &[Point2]) -> Vec<Point2> {
    let mut pts: Vec<Point2> = Vec::new();
    for p in points {
        if !pts.contains(p) {
            pts.push(*p);
        }
    }
    let n = pts.len();
    if n <= 2 {
        return pts;
    }
    let mut out: Vec<Point2> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            // edge i -> j is a hull edge when nobody lies strictly to its right
            let all_left = (0..n).all(|k| orient(pts[i], pts[j], pts[k]) >= -1e-12);
            if !all_left {
                continue;
            }
            // keep only the extreme points on that line
            let dir = Point2::new(pts[j].x - pts[i].x, pts[j].y - pts[i].y);
            let on_line: Vec<Point2> = (0..n)
                .filter(|&k| orient(pts[i], pts[j], pts[k]).abs() <= 1e-12)
                .map(|k| pts[k])
                .collect();
            let proj = |p: &Point2| p.x * dir.x + p.y * dir.y;
            let lo = on_line.iter().copied().min_by(|a, b| proj(a).total_cmp(&proj(b))).unwrap();
            let hi = on_line.iter().copied().max_by(|a, b| proj(a).total_cmp(&proj(b))).unwrap();
            for v in [lo, hi] {
                if !out.contains(&v) {
                    out.push(v);
                }
            }
        }
    }
    out
}

pub fn sorted(mut v: Vec<Point2>) -> Vec<(f64, f64)> {
    let mut t: Vec<(f64, f64)> = v.drain(..).map(|p| (p.x, p.y)).collect();
    t.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    t
}

fn encloses(c: (f64, f64, f64), pts: &[Point2]) -> bool {
    pts.iter()
        .all(|p| ((p.x - c.0).powi(2) + (p.y - c.1).powi(2)).sqrt() <= c.2 + 1e-9)
}

/// Minimum radius over every pair-diameter and triple-circumcircle that
/// encloses all points.
pub fn brute_sec_radius(pts: &[Point2]) -> f64 {
    if pts.len() == 1 {
        return 0.0;
    }
    let mut best = f64::INFINITY;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let (a, b) = (pts[i], pts[j]);
            let c = ((a.x + b.x) / 2.0, (a.y + b.y) / 2.0, ((a.x - b.x).hypot(a.y - b.y)) / 2.0);
            if c.2 < best && encloses(c, pts) {
                best = c.2;
            }
            for k in j + 1..pts.len() {
                let cc = pts[k];
                let d = 2.0 * (a.x * (b.y - cc.y) + b.x * (cc.y - a.y) + cc.x * (a.y - b.y));
                if d.abs() < 1e-12 {
                    continue;
                }
                let a2 = a.x * a.x + a.y * a.y;
                let b2 = b.x * b.x + b.y * b.y;
                let c2 = cc.x * cc.x + cc.y * cc.y;
                let ux = (a2 * (b.y - cc.y) + b2 * (cc.y - a.y) + c2 * (a.y - b.y)) / d;
                let uy = (a2 * (cc.x - b.x) + b2 * (a.x - cc.x) + c2 * (b.x - a.x)) / d;
                let r = (a.x - ux).hypot(a.y - uy);
                if r < best && encloses((ux, uy, r), pts) {
                    best = r;
                }
            }
        }
    }
    best
}

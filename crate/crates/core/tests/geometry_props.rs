mod common;

use proptest::prelude::*;
use uav_scope::geometry::{
    centroid, convex_hull, cross, nearest_unserved, smallest_enclosing_circle, GEOM_EPS,
};
use uav_scope::Point2;

use common::{brute_hull_vertices, brute_sec_radius, random_points, rng, sorted};

fn pts_strategy(max: usize) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((0.0..400.0f64, 0.0..400.0f64), 1..max)
        .prop_map(|v| v.into_iter().map(|(x, y)| Point2::new(x, y)).collect())
}

// lattice points force collinear and duplicate inputs
fn lattice_strategy(max: usize) -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((0..6i32, 0..6i32), 1..max).prop_map(|v| {
        v.into_iter()
            .map(|(x, y)| Point2::new(x as f64 * 10.0, y as f64 * 10.0))
            .collect()
    })
}

fn inside_or_on(hull: &[Point2], p: &Point2) -> bool {
    match hull.len() {
        1 => hull[0].distance(p) <= GEOM_EPS,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(&a, &b, p).abs() <= GEOM_EPS * a.distance(&b).max(1.0)
                && p.distance(&a) + p.distance(&b) <= a.distance(&b) + GEOM_EPS
        }
        n => (0..n).all(|i| cross(&hull[i], &hull[(i + 1) % n], p) >= -GEOM_EPS),
    }
}

proptest! {
    #[test]
    fn hull_contains_every_point(pts in pts_strategy(60)) {
        let hull = convex_hull(&pts).unwrap();
        for p in &pts {
            prop_assert!(inside_or_on(&hull, p));
        }
    }

    #[test]
    fn hull_is_counter_clockwise_and_strict(pts in lattice_strategy(40)) {
        let hull = convex_hull(&pts).unwrap();
        let n = hull.len();
        if n >= 3 {
            for i in 0..n {
                prop_assert!(cross(&hull[i], &hull[(i + 1) % n], &hull[(i + 2) % n]) > 0.0);
            }
        }
        let start = hull[0];
        prop_assert!(hull.iter().all(|p| (start.x, start.y) <= (p.x, p.y)));
    }

    #[test]
    fn hull_is_idempotent(pts in lattice_strategy(40)) {
        let once = convex_hull(&pts).unwrap();
        prop_assert_eq!(convex_hull(&once).unwrap(), once);
    }

    #[test]
    fn hull_matches_brute_force_on_lattices(pts in lattice_strategy(30)) {
        let hull = convex_hull(&pts).unwrap();
        prop_assert_eq!(sorted(hull), sorted(brute_hull_vertices(&pts)));
    }

    #[test]
    fn sec_encloses_and_is_minimal(pts in pts_strategy(12)) {
        let c = smallest_enclosing_circle(&pts).unwrap();
        for p in &pts {
            prop_assert!(c.center.distance(p) <= c.radius + GEOM_EPS);
        }
        prop_assert!((c.radius - brute_sec_radius(&pts)).abs() < 1e-9);
    }

    #[test]
    fn sec_is_deterministic(pts in pts_strategy(40)) {
        let a = smallest_enclosing_circle(&pts).unwrap();
        let b = smallest_enclosing_circle(&pts).unwrap();
        prop_assert_eq!(a.center.x.to_bits(), b.center.x.to_bits());
        prop_assert_eq!(a.radius.to_bits(), b.radius.to_bits());
    }
}

#[test]
fn hull_of_random_sets_matches_brute_force() {
    let mut r = rng(7);
    for n in 3..=50 {
        let pts = random_points(&mut r, n, 400.0);
        assert_eq!(sorted(convex_hull(&pts).unwrap()), sorted(brute_hull_vertices(&pts)), "n = {n}");
    }
}

#[test]
fn nearest_matches_linear_scan() {
    let mut r = rng(3);
    let cands = random_points(&mut r, 100, 400.0);
    let reference = Point2::new(1.0, 1.0);
    let mut best = 0;
    for (i, c) in cands.iter().enumerate() {
        if c.distance_sq(&reference) < cands[best].distance_sq(&reference) {
            best = i;
        }
    }
    assert_eq!(nearest_unserved(&reference, &cands).unwrap(), best);
}

#[test]
fn centroid_of_triangle() {
    let c = centroid(&[Point2::new(0., 0.), Point2::new(3., 0.), Point2::new(0., 3.)]).unwrap();
    assert!((c.x - 1.0).abs() < 1e-15 && (c.y - 1.0).abs() < 1e-15);
}

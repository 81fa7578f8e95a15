//! Comparison placements: counter-clockwise spiral, K-Means, Voronoi and
//! random. All of them honor association uniqueness, per-UAV capacity and the
//! altitude window, but none enforces the rate target; rates are judged
//! afterwards by [`crate::metrics`].

use std::time::Instant;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channel::{coverage_radius, required_altitude, ChannelParams, DeploymentConstraints};
use crate::deployment::{Deployment, SolverOptions, UavBs};
use crate::error::{Error, Result};
use crate::geometry::{
    centroid, convex_hull_indices, nearest_of, smallest_enclosing_circle_seeded, Circle, Point2,
    Point3,
};
use crate::scenario::{Area, GroundUser};

/// Altitude flown by every spiral UAV, m.
pub const CCS_ALTITUDE: f64 = 100.0;

/// Lloyd iteration cap for K-Means.
pub const KMEANS_MAX_ITER: usize = 100;

// Slack for "user sits on the disk edge" after pushing a disk inward.
const EDGE_SLACK: f64 = 1e-6;

fn positions(users: &[GroundUser]) -> Vec<Point2> {
    users.iter().map(|u| u.pos).collect()
}

fn bounding_area(points: &[Point2]) -> (Point2, Point2) {
    let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in points {
        lo = Point2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

fn sampling_box(points: &[Point2], area: Option<Area>) -> (Point2, Point2) {
    match area {
        Some(a) => (Point2::new(0.0, 0.0), Point2::new(a.width, a.height)),
        None => bounding_area(points),
    }
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if k > n {
        return Err(Error::InvalidParameter(format!(
            "k = {k} exceeds the {n} users available"
        )));
    }
    Ok(())
}

/// Keeps the `gamma` members closest to `center` (index order breaks ties).
fn admit_nearest_first(center: &Point2, mut members: Vec<usize>, pts: &[Point2], gamma: usize) -> Vec<usize> {
    members.sort_by(|&a, &b| {
        center
            .distance_sq(&pts[a])
            .total_cmp(&center.distance_sq(&pts[b]))
            .then(a.cmp(&b))
    });
    members.truncate(gamma);
    members
}

/// Assigns every point to its nearest center; ties go to the lower center.
fn nearest_assignment(pts: &[Point2], centers: &[Point2]) -> Vec<usize> {
    pts.iter()
        .map(|p| nearest_of(p, centers.iter().copied().enumerate()).expect("centers non-empty"))
        .collect()
}

fn groups(assignment: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new(); k];
    for (i, &c) in assignment.iter().enumerate() {
        out[c].push(i);
    }
    out
}

// Altitude policy shared by K-Means and Voronoi.
fn baseline_altitude(r_sec: f64, constraints: &DeploymentConstraints, options: &SolverOptions) -> f64 {
    match options.baseline_fixed_altitude {
        Some(h) => h.clamp(constraints.h_min, constraints.h_max),
        None => required_altitude(r_sec, constraints.theta_bw, constraints.h_min).min(constraints.h_max),
    }
}

fn make_uav(id: usize, center: Point2, h: f64, theta_bw: f64, served: Vec<usize>, users: &[GroundUser]) -> UavBs {
    UavBs {
        id,
        pos: Point3::new(center.x, center.y, h),
        coverage: Circle::new(center, coverage_radius(h, theta_bw)),
        served: served.into_iter().map(|i| users[i].id).collect(),
    }
}

/// Places one UAV per cell at the cell's enclosing-circle center, or at
/// `fallback[c]` when the cell is empty, then admits cell members up to
/// capacity, nearest first.
fn place_on_cells(
    users: &[GroundUser],
    pts: &[Point2],
    cells: &[Vec<usize>],
    fallback: &[Point2],
    constraints: &DeploymentConstraints,
    options: &SolverOptions,
) -> Vec<UavBs> {
    let gamma = constraints.gamma_max();
    cells
        .iter()
        .enumerate()
        .map(|(c, members)| {
            let (center, r) = if members.is_empty() {
                (fallback[c], 0.0)
            } else {
                let cell_pts: Vec<Point2> = members.iter().map(|&i| pts[i]).collect();
                let sec = smallest_enclosing_circle_seeded(&cell_pts, options.sec_seed)
                    .expect("cell non-empty");
                (sec.center, sec.radius)
            };
            let h = baseline_altitude(r, constraints, options);
            let served = admit_nearest_first(&center, members.clone(), pts, gamma);
            make_uav(c, center, h, constraints.theta_bw, served, users)
        })
        .collect()
}

/// Spiral placement from the boundary inward with fixed altitude and radius.
///
/// Each step takes the next uncovered hull user counter-clockwise (around the
/// area center) from the previous one, pushes a fixed disk inward so that user
/// sits on its edge, and serves the uncovered users inside it, nearest first.
pub fn run_ccs(
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<Deployment> {
    run_ccs_with(users, constraints, params, &SolverOptions::default())
}

pub fn run_ccs_with(
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    constraints.validate()?;
    params.validate()?;
    if users.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let start = Instant::now();
    let pts = positions(users);
    let theta = constraints.theta_bw;
    let gamma = constraints.gamma_max();
    let h = CCS_ALTITUDE.clamp(constraints.h_min, constraints.h_max);
    let r = coverage_radius(h, theta);
    let anchor = match options.area {
        Some(a) => a.center(),
        None => centroid(&pts)?,
    };
    let angle_of = |p: &Point2| (p.y - anchor.y).atan2(p.x - anchor.x).rem_euclid(std::f64::consts::TAU);

    let mut remaining: Vec<usize> = (0..users.len()).collect();
    let mut covered = vec![false; users.len()];
    let mut uavs = Vec::new();
    let mut prev_angle: Option<f64> = None;

    while !remaining.is_empty() && uavs.len() < constraints.k_max {
        let rem_pts: Vec<Point2> = remaining.iter().map(|&i| pts[i]).collect();
        let hull: Vec<usize> = convex_hull_indices(&rem_pts)?
            .into_iter()
            .map(|k| remaining[k])
            .collect();
        let boundary = match prev_angle {
            None => hull[0],
            Some(prev) => *hull
                .iter()
                .min_by(|&&a, &&b| {
                    let da = (angle_of(&pts[a]) - prev).rem_euclid(std::f64::consts::TAU);
                    let db = (angle_of(&pts[b]) - prev).rem_euclid(std::f64::consts::TAU);
                    // a vertex at exactly the previous angle comes last
                    let da = if da <= 1e-12 { f64::INFINITY } else { da };
                    let db = if db <= 1e-12 { f64::INFINITY } else { db };
                    da.total_cmp(&db)
                })
                .expect("hull non-empty"),
        };
        let b = pts[boundary];
        let to_anchor = Point2::new(anchor.x - b.x, anchor.y - b.y);
        let len = to_anchor.x.hypot(to_anchor.y);
        let center = if len > 0.0 {
            Point2::new(b.x + r * to_anchor.x / len, b.y + r * to_anchor.y / len)
        } else {
            b
        };
        let inside: Vec<usize> = remaining
            .iter()
            .copied()
            .filter(|&i| center.distance(&pts[i]) <= r + EDGE_SLACK)
            .collect();
        let served = admit_nearest_first(&center, inside, &pts, gamma);
        debug_assert!(!served.is_empty());
        for &i in &served {
            covered[i] = true;
        }
        uavs.push(make_uav(uavs.len(), center, h, theta, served, users));
        remaining.retain(|&i| !covered[i]);
        prev_angle = Some(angle_of(&b));
    }

    let mut d = Deployment::from_uavs(uavs);
    d.solve_time = start.elapsed().as_secs_f64();
    Ok(d)
}

/// Result of Lloyd's algorithm.
#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub centroids: Vec<Point2>,
    pub assignment: Vec<usize>,
    /// Within-cluster sum of squared distances after each update.
    pub sse_history: Vec<f64>,
    pub iterations: usize,
}

fn sse(pts: &[Point2], centroids: &[Point2], assignment: &[usize]) -> f64 {
    pts.iter()
        .zip(assignment)
        .map(|(p, &c)| p.distance_sq(&centroids[c]))
        .sum()
}

/// Lloyd's iterations from `k` distinct seeded users until the assignment
/// stops changing or `max_iter` updates have run. Empty clusters keep their
/// previous centroid.
pub fn kmeans_lloyd(pts: &[Point2], k: usize, seed: u64, max_iter: usize) -> Result<KMeansFit> {
    check_k(k, pts.len())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids: Vec<Point2> = sample(&mut rng, pts.len(), k)
        .into_iter()
        .map(|i| pts[i])
        .collect();
    let mut assignment = nearest_assignment(pts, &centroids);
    let mut sse_history = Vec::new();
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        for (c, members) in groups(&assignment, k).iter().enumerate() {
            if !members.is_empty() {
                let member_pts: Vec<Point2> = members.iter().map(|&i| pts[i]).collect();
                centroids[c] = centroid(&member_pts)?;
            }
        }
        sse_history.push(sse(pts, &centroids, &assignment));
        let next = nearest_assignment(pts, &centroids);
        if next == assignment {
            break;
        }
        assignment = next;
    }
    Ok(KMeansFit {
        centroids,
        assignment,
        sse_history,
        iterations,
    })
}

pub fn run_kmeans(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<Deployment> {
    run_kmeans_with(users, k, constraints, params, &SolverOptions::default())
}

/// K-Means placement: one UAV per cluster at its enclosing-circle center,
/// users associated with the nearest UAV up to capacity.
pub fn run_kmeans_with(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    constraints.validate()?;
    params.validate()?;
    check_k(k, users.len())?;
    let start = Instant::now();
    let pts = positions(users);
    let fit = kmeans_lloyd(&pts, k, options.seed, KMEANS_MAX_ITER)?;
    let clusters = groups(&fit.assignment, k);

    // place, then re-associate against the final UAV positions
    let placed = place_on_cells(users, &pts, &clusters, &fit.centroids, constraints, options);
    let centers: Vec<Point2> = placed.iter().map(|u| u.coverage.center).collect();
    let cells = groups(&nearest_assignment(&pts, &centers), k);
    let gamma = constraints.gamma_max();
    let uavs = placed
        .into_iter()
        .zip(cells)
        .map(|(mut uav, members)| {
            let served = admit_nearest_first(&uav.coverage.center, members, &pts, gamma);
            uav.served = served.into_iter().map(|i| users[i].id).collect();
            uav
        })
        .collect();

    let mut d = Deployment::from_uavs(uavs);
    d.solve_time = start.elapsed().as_secs_f64();
    Ok(d)
}

pub fn run_voronoi(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<Deployment> {
    run_voronoi_with(users, k, constraints, params, &SolverOptions::default())
}

/// Voronoi placement: `k` random generator sites, each user in the cell of
/// its nearest site, one UAV per cell.
pub fn run_voronoi_with(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    constraints.validate()?;
    params.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if users.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let start = Instant::now();
    let pts = positions(users);
    let (lo, hi) = sampling_box(&pts, options.area);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let sites: Vec<Point2> = (0..k)
        .map(|_| {
            Point2::new(
                lo.x + rng.random::<f64>() * (hi.x - lo.x),
                lo.y + rng.random::<f64>() * (hi.y - lo.y),
            )
        })
        .collect();
    let cells = groups(&nearest_assignment(&pts, &sites), k);
    let uavs = place_on_cells(users, &pts, &cells, &sites, constraints, options);

    let mut d = Deployment::from_uavs(uavs);
    d.solve_time = start.elapsed().as_secs_f64();
    Ok(d)
}

pub fn run_random(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<Deployment> {
    run_random_with(users, k, constraints, params, &SolverOptions::default())
}

/// `k` UAVs uniform over the area and altitude window; nearest-UAV
/// association up to capacity.
pub fn run_random_with(
    users: &[GroundUser],
    k: usize,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    constraints.validate()?;
    params.validate()?;
    if k < 1 {
        return Err(Error::InvalidParameter("k must be >= 1".into()));
    }
    if users.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let start = Instant::now();
    let pts = positions(users);
    let (lo, hi) = sampling_box(&pts, options.area);
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    let placed: Vec<Point3> = (0..k)
        .map(|_| {
            Point3::new(
                lo.x + rng.random::<f64>() * (hi.x - lo.x),
                lo.y + rng.random::<f64>() * (hi.y - lo.y),
                constraints.h_min + rng.random::<f64>() * (constraints.h_max - constraints.h_min),
            )
        })
        .collect();
    let centers: Vec<Point2> = placed.iter().map(Point3::ground).collect();
    let cells = groups(&nearest_assignment(&pts, &centers), k);
    let gamma = constraints.gamma_max();
    let uavs = placed
        .iter()
        .zip(cells)
        .enumerate()
        .map(|(j, (p, members))| {
            let served = admit_nearest_first(&p.ground(), members, &pts, gamma);
            make_uav(j, p.ground(), p.h, constraints.theta_bw, served, users)
        })
        .collect();

    let mut d = Deployment::from_uavs(uavs);
    d.solve_time = start.elapsed().as_secs_f64();
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validate::{validate_deployment, QosPolicy};

    fn users(raw: &[(f64, f64)]) -> Vec<GroundUser> {
        raw.iter()
            .enumerate()
            .map(|(id, &(x, y))| GroundUser {
                id,
                pos: Point2::new(x, y),
                vel: Point2::new(0.0, 0.0),
            })
            .collect()
    }

    fn blob(cx: f64, cy: f64, n: usize, offset: usize) -> Vec<GroundUser> {
        (0..n)
            .map(|i| {
                let t = i as f64 * 2.399;
                let r = 8.0 * ((i + 1) as f64 / n as f64).sqrt();
                GroundUser {
                    id: offset + i,
                    pos: Point2::new(cx + r * t.cos(), cy + r * t.sin()),
                    vel: Point2::new(0.0, 0.0),
                }
            })
            .collect()
    }

    #[test]
    fn ccs_single_user() {
        let c = DeploymentConstraints::default();
        let u = users(&[(50.0, 60.0)]);
        let d = run_ccs(&u, &c, &ChannelParams::default()).unwrap();
        assert_eq!(d.uavs.len(), 1);
        assert_eq!(d.uavs[0].pos.h, CCS_ALTITUDE);
        assert!(d.uavs[0].coverage.contains(&u[0].pos));
        assert_eq!(d.n_served(), 1);
    }

    #[test]
    fn ccs_one_disk_holds_small_group() {
        let u = blob(200.0, 200.0, 20, 0);
        let d = run_ccs(&u, &DeploymentConstraints::default(), &ChannelParams::default()).unwrap();
        assert_eq!(d.uavs.len(), 1);
        assert_eq!(d.n_served(), 20);
    }

    #[test]
    fn ccs_boundary_user_sits_on_edge() {
        let u = users(&[(0.0, 0.0), (300.0, 0.0), (150.0, 260.0), (150.0, 90.0)]);
        let opts = SolverOptions {
            area: Some(Area {
                width: 300.0,
                height: 300.0,
            }),
            ..SolverOptions::default()
        };
        let d = run_ccs_with(&u, &DeploymentConstraints::default(), &ChannelParams::default(), &opts)
            .unwrap();
        let first = &d.uavs[0];
        assert!(first.served.contains(&0));
        let dist = first.coverage.center.distance(&u[0].pos);
        assert!((dist - first.coverage.radius).abs() < 1e-6);
    }

    #[test]
    fn kmeans_k1_tight_blob_serves_all() {
        let u = blob(100.0, 100.0, 30, 0);
        let c = DeploymentConstraints::default();
        let p = ChannelParams::default();
        let d = run_kmeans(&u, 1, &c, &p).unwrap();
        assert_eq!(d.uavs.len(), 1);
        assert_eq!(d.n_served(), 30);
        assert_eq!(crate::metrics::satisfaction(&d, &u, &c, &p).unwrap(), 1.0);
    }

    #[test]
    fn kmeans_k_equals_n_private_uavs() {
        let u = users(&[(0., 0.), (100., 0.), (0., 100.), (300., 300.)]);
        let d = run_kmeans(&u, 4, &DeploymentConstraints::default(), &ChannelParams::default())
            .unwrap();
        assert_eq!(d.loads(), vec![1, 1, 1, 1]);
        assert!(d.uavs.iter().all(|u| u.pos.h == 10.0));
    }

    #[test]
    fn kmeans_rejects_zero_k() {
        let u = users(&[(0., 0.)]);
        assert!(run_kmeans(&u, 0, &DeploymentConstraints::default(), &ChannelParams::default()).is_err());
    }

    #[test]
    fn kmeans_sse_never_increases() {
        let cfg = crate::scenario::ScenarioConfig {
            n_users: 500,
            seed: 5,
            ..Default::default()
        };
        let pts: Vec<Point2> = crate::scenario::generate_users(&cfg)
            .unwrap()
            .iter()
            .map(|u| u.pos)
            .collect();
        for k in [2, 7, 15] {
            let fit = kmeans_lloyd(&pts, k, 3, KMEANS_MAX_ITER).unwrap();
            for w in fit.sse_history.windows(2) {
                assert!(w[1] <= w[0] * (1.0 + 1e-12), "{:?}", fit.sse_history);
            }
        }
    }

    #[test]
    fn voronoi_k1_is_single_enclosing_circle() {
        let u = blob(150.0, 150.0, 25, 0);
        let d = run_voronoi(&u, 1, &DeploymentConstraints::default(), &ChannelParams::default())
            .unwrap();
        let pts: Vec<Point2> = u.iter().map(|u| u.pos).collect();
        let sec = smallest_enclosing_circle_seeded(&pts, SolverOptions::default().sec_seed).unwrap();
        assert_eq!(d.uavs[0].coverage.center, sec.center);
        assert_eq!(d.n_served(), 25);
    }

    #[test]
    fn voronoi_two_blobs_split_per_blob() {
        let mut u = blob(60.0, 60.0, 15, 0);
        u.extend(blob(340.0, 340.0, 15, 15));
        let opts = SolverOptions {
            area: Some(Area {
                width: 400.0,
                height: 400.0,
            }),
            seed: 9,
            ..SolverOptions::default()
        };
        // try seeds until sites fall one per blob, then check the split
        let d = (0..50)
            .map(|s| {
                run_voronoi_with(
                    &u,
                    2,
                    &DeploymentConstraints::default(),
                    &ChannelParams::default(),
                    &SolverOptions { seed: s, ..opts },
                )
                .unwrap()
            })
            .find(|d| d.loads() == vec![15, 15])
            .expect("some seed separates the blobs");
        let a = d.uavs[0].coverage.center;
        let b = d.uavs[1].coverage.center;
        assert!(a.distance(&b) > 250.0);
    }

    #[test]
    fn random_is_seeded_and_rejects_zero() {
        let cfg = crate::scenario::ScenarioConfig {
            n_users: 200,
            ..Default::default()
        };
        let u = crate::scenario::generate_users(&cfg).unwrap();
        let c = DeploymentConstraints::default();
        let p = ChannelParams::default();
        let opts = SolverOptions {
            seed: 4,
            ..Default::default()
        };
        let a = run_random_with(&u, 6, &c, &p, &opts).unwrap();
        let b = run_random_with(&u, 6, &c, &p, &opts).unwrap();
        assert_eq!(a.uavs, b.uavs);
        assert!(run_random(&u, 0, &c, &p).is_err());
    }

    #[test]
    fn baselines_respect_structural_constraints() {
        let cfg = crate::scenario::ScenarioConfig {
            n_users: 600,
            seed: 21,
            ..Default::default()
        };
        let u = crate::scenario::generate_users(&cfg).unwrap();
        let c = DeploymentConstraints {
            r_min_rate: 6e6,
            ..Default::default()
        };
        let p = ChannelParams::default();
        let opts = SolverOptions {
            area: Some(cfg.area()),
            seed: 21,
            ..Default::default()
        };
        let runs = [
            run_ccs_with(&u, &c, &p, &opts).unwrap(),
            run_kmeans_with(&u, 12, &c, &p, &opts).unwrap(),
            run_voronoi_with(&u, 12, &c, &p, &opts).unwrap(),
            run_random_with(&u, 12, &c, &p, &opts).unwrap(),
            run_kmeans_with(
                &u,
                12,
                &c,
                &p,
                &SolverOptions {
                    baseline_fixed_altitude: Some(100.0),
                    ..opts
                },
            )
            .unwrap(),
        ];
        for d in &runs {
            let report = validate_deployment(d, &u, &c, &p, QosPolicy::Evaluated);
            assert!(report.is_ok(), "{:?}", report);
        }
        assert!(runs[4].uavs.iter().all(|u| u.pos.h == 100.0));
    }
}

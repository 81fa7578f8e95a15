//! Perimeter-peeling deployment.
//!
//! The outer loop takes the convex hull of the users still uncovered, seeds a
//! cluster at the first counter-clockwise hull vertex, grows that cluster
//! greedily and commits one UAV per cluster. Growth adds the uncovered user
//! nearest to the running centroid, recomputes the smallest enclosing circle
//! and the altitude needed to cover it, and stops at the first candidate that
//! breaks capacity, the altitude ceiling, or the minimum rate. The UAV is then
//! placed at the last feasible state. A seed that misses the rate even on its
//! own is dropped and left unserved.
//!
//! Interference during the rate check comes from UAVs already committed; UAVs
//! deployed later are only seen by the post-hoc metrics.

use std::time::Instant;

use serde::Serialize;

use crate::channel::{
    coverage_radius, in_footprint, received_power, required_altitude, shannon_rate, ChannelParams,
    DeploymentConstraints,
};
use crate::deployment::{Deployment, SolverOptions, UavBs};
use crate::error::Result;
use crate::geometry::{
    convex_hull, nearest_of, smallest_enclosing_circle_seeded, Circle, Point2, Point3, GEOM_EPS,
};
use crate::scenario::GroundUser;

/// Outcome of testing one candidate cluster, in check order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Ok,
    Capacity,
    Altitude,
    Qos,
}

/// Why a cluster stopped growing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Capacity,
    Altitude,
    Qos,
    /// No uncovered users left to add.
    Exhausted,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assessment {
    pub verdict: Verdict,
    /// Altitude needed to cover the candidate circle, capped at `h_max`.
    pub altitude: f64,
    /// Lowest member rate at that altitude, bps. NaN when the rate check
    /// was not reached.
    pub worst_rate: f64,
}

/// Interference (W) seen at `p` from every UAV in `uavs` whose footprint
/// covers it.
fn interference_at(p: &Point2, uavs: &[Point3], params: &ChannelParams, theta_bw: f64) -> f64 {
    uavs.iter()
        .filter(|u| in_footprint(u, p, theta_bw))
        .map(|u| received_power(u, p, params).unwrap_or(0.0))
        .sum()
}

// Core of the feasibility test with per-member interference precomputed.
fn assess(
    members: &[Point2],
    interference: &[f64],
    circle: &Circle,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Assessment {
    let mut out = Assessment {
        verdict: Verdict::Ok,
        altitude: f64::NAN,
        worst_rate: f64::NAN,
    };
    if members.len() > constraints.gamma_max() {
        out.verdict = Verdict::Capacity;
        return out;
    }
    let h_req = required_altitude(circle.radius, constraints.theta_bw, constraints.h_min);
    out.altitude = h_req.min(constraints.h_max);
    if h_req > constraints.h_max + GEOM_EPS {
        out.verdict = Verdict::Altitude;
        return out;
    }

    let uav = Point3::new(circle.center.x, circle.center.y, out.altitude);
    let share = params.bandwidth / members.len() as f64;
    let noise = params.noise_density * share;
    let worst = members
        .iter()
        .zip(interference)
        .map(|(p, i)| {
            let signal = received_power(&uav, p, params).unwrap_or(0.0);
            shannon_rate(share, signal / (i + noise))
        })
        .fold(f64::INFINITY, f64::min);
    out.worst_rate = worst;
    if worst < constraints.r_min_rate {
        out.verdict = Verdict::Qos;
    }
    out
}

/// Checks a candidate cluster against capacity, then altitude, then rate.
///
/// The rate check places the UAV at the circle center at the required
/// altitude, splits the band over the whole cluster, and takes the lowest
/// member rate with `existing_uavs` as interferers. Without interference the
/// lowest rate belongs to the member farthest from the center.
pub fn check_feasibility(
    cluster: &[Point2],
    candidate_circle: &Circle,
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    existing_uavs: &[Point3],
) -> Assessment {
    let interference: Vec<f64> = cluster
        .iter()
        .map(|p| interference_at(p, existing_uavs, params, constraints.theta_bw))
        .collect();
    assess(cluster, &interference, candidate_circle, constraints, params)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterOutcome {
    pub pos: Point3,
    /// Enclosing circle of the members.
    pub circle: Circle,
    /// Indices into the position slice, in admission order; the seed first.
    pub members: Vec<usize>,
    pub stop: StopReason,
    /// Enclosing-circle radius after every accepted admission.
    pub radius_history: Vec<f64>,
}

/// Grows one cluster from `seed` over the `uncovered` indices of `positions`.
pub fn cluster_and_sec(
    seed: usize,
    uncovered: &[usize],
    positions: &[Point2],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    existing_uavs: &[Point3],
    sec_seed: u64,
) -> ClusterOutcome {
    let theta = constraints.theta_bw;
    let gamma = constraints.gamma_max();
    let seed_pos = positions[seed];

    let mut in_cluster = vec![false; positions.len()];
    in_cluster[seed] = true;
    let mut members = vec![seed];
    let mut member_pts = vec![seed_pos];
    let mut interference = vec![interference_at(&seed_pos, existing_uavs, params, theta)];
    let mut sum = seed_pos;

    let mut pos = Point3::new(seed_pos.x, seed_pos.y, constraints.h_min);
    let mut circle = Circle::new(seed_pos, 0.0);
    let mut radius_history = vec![0.0];
    let mut stop = StopReason::Exhausted;

    loop {
        if members.len() >= gamma {
            stop = StopReason::Capacity;
            break;
        }
        let n = members.len() as f64;
        let center = Point2::new(sum.x / n, sum.y / n);
        let candidates = uncovered
            .iter()
            .filter(|&&i| !in_cluster[i])
            .map(|&i| (i, positions[i]));
        let Some(next) = nearest_of(&center, candidates) else {
            break;
        };
        let next_pos = positions[next];

        member_pts.push(next_pos);
        interference.push(interference_at(&next_pos, existing_uavs, params, theta));
        let test_circle = smallest_enclosing_circle_seeded(&member_pts, sec_seed)
            .expect("cluster is non-empty");
        let verdict = assess(&member_pts, &interference, &test_circle, constraints, params);
        if verdict.verdict != Verdict::Ok {
            member_pts.pop();
            interference.pop();
            stop = match verdict.verdict {
                Verdict::Capacity => StopReason::Capacity,
                Verdict::Altitude => StopReason::Altitude,
                _ => StopReason::Qos,
            };
            break;
        }

        in_cluster[next] = true;
        members.push(next);
        sum = Point2::new(sum.x + next_pos.x, sum.y + next_pos.y);
        circle = test_circle;
        pos = Point3::new(circle.center.x, circle.center.y, verdict.altitude);
        radius_history.push(circle.radius);
    }

    ClusterOutcome {
        pos,
        circle,
        members,
        stop,
        radius_history,
    }
}

/// One pass of the outer loop.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationRecord {
    /// User id of the hull seed.
    pub seed: usize,
    pub uncovered_before: usize,
    pub served: usize,
    pub stop: StopReason,
}

#[derive(Debug, Clone)]
pub struct ScopeRun {
    pub deployment: Deployment,
    pub iterations: Vec<IterationRecord>,
    pub clusters: Vec<ClusterOutcome>,
    /// Ids of hull seeds dropped because they miss the rate target even alone
    /// under the interference already committed. They stay unserved.
    pub rejected_seeds: Vec<usize>,
}

pub fn run_scope(
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<Deployment> {
    run_scope_with(users, constraints, params, &SolverOptions::default())
}

pub fn run_scope_with(
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<Deployment> {
    Ok(run_scope_traced(users, constraints, params, options)?.deployment)
}

/// Full solve, keeping per-iteration records for inspection.
pub fn run_scope_traced(
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    options: &SolverOptions,
) -> Result<ScopeRun> {
    constraints.validate()?;
    params.validate()?;
    let start = Instant::now();
    let positions: Vec<Point2> = users.iter().map(|u| u.pos).collect();
    let theta = constraints.theta_bw;

    let mut remaining: Vec<usize> = (0..users.len()).collect();
    let mut uavs: Vec<UavBs> = Vec::new();
    let mut placed: Vec<Point3> = Vec::new();
    let mut iterations = Vec::new();
    let mut clusters = Vec::new();
    let mut covered = vec![false; users.len()];
    let mut rejected_seeds = Vec::new();

    while !remaining.is_empty() && uavs.len() < constraints.k_max {
        let pts: Vec<Point2> = remaining.iter().map(|&i| positions[i]).collect();
        let boundary = convex_hull(&pts)?;
        let first = boundary[0];
        let seed = remaining
            .iter()
            .copied()
            .find(|&i| positions[i] == first)
            .expect("hull vertex is an uncovered user");

        let alone = check_feasibility(
            &[positions[seed]],
            &Circle::new(positions[seed], 0.0),
            constraints,
            params,
            &placed,
        );
        if alone.verdict != Verdict::Ok {
            rejected_seeds.push(users[seed].id);
            covered[seed] = true;
            remaining.retain(|&i| !covered[i]);
            continue;
        }

        let outcome = cluster_and_sec(
            seed,
            &remaining,
            &positions,
            constraints,
            params,
            &placed,
            options.sec_seed,
        );

        let id = uavs.len();
        iterations.push(IterationRecord {
            seed: users[seed].id,
            uncovered_before: remaining.len(),
            served: outcome.members.len(),
            stop: outcome.stop,
        });
        for &m in &outcome.members {
            covered[m] = true;
        }
        uavs.push(UavBs {
            id,
            pos: outcome.pos,
            coverage: Circle::new(outcome.circle.center, coverage_radius(outcome.pos.h, theta)),
            served: outcome.members.iter().map(|&m| users[m].id).collect(),
        });
        placed.push(outcome.pos);
        remaining.retain(|&i| !covered[i]);
        clusters.push(outcome);
    }

    let mut deployment = Deployment::from_uavs(uavs);
    deployment.solve_time = start.elapsed().as_secs_f64();
    log::debug!(
        "scope: {} UAVs, {}/{} users associated, {} seeds rejected, {:.3} ms",
        deployment.uavs.len(),
        deployment.n_served(),
        users.len(),
        rejected_seeds.len(),
        deployment.solve_time * 1e3
    );
    Ok(ScopeRun {
        deployment,
        iterations,
        clusters,
        rejected_seeds,
    })
}

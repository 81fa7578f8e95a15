//! Post-hoc feasibility checker for deployments.
//!
//! Recomputes everything from the exported positions and association, so it
//! can vet a deployment produced by any solver, including one read from disk.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::channel::{achievable_rate, coverage_radius, ChannelParams, DeploymentConstraints};
use crate::deployment::Deployment;
use crate::geometry::{Point2, GEOM_EPS};
use crate::scenario::GroundUser;

// Relative slack when comparing a recomputed rate against the QoS target.
const RATE_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QosPolicy {
    /// Every served user met the target against the UAVs committed before
    /// its own, and lies inside its UAV's footprint.
    Sequential,
    /// Rates are reported but not required.
    Evaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub association: Vec<String>,
    pub capacity: Vec<String>,
    pub altitude: Vec<String>,
    pub fleet: Vec<String>,
    pub footprint: Vec<String>,
    pub qos: Vec<String>,
    /// Lowest served-user rate under the sequential interference rule, bps.
    pub min_sequential_rate: Option<f64>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations().next().is_none()
    }

    pub fn violations(&self) -> impl Iterator<Item = &String> {
        self.association
            .iter()
            .chain(&self.capacity)
            .chain(&self.altitude)
            .chain(&self.fleet)
            .chain(&self.footprint)
            .chain(&self.qos)
    }
}

pub fn validate_deployment(
    deployment: &Deployment,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
    policy: QosPolicy,
) -> ValidationReport {
    let mut report = ValidationReport {
        association: Vec::new(),
        capacity: Vec::new(),
        altitude: Vec::new(),
        fleet: Vec::new(),
        footprint: Vec::new(),
        qos: Vec::new(),
        min_sequential_rate: None,
    };
    let lookup: HashMap<usize, Point2> = users.iter().map(|u| (u.id, u.pos)).collect();
    let gamma = constraints.gamma_max();
    let theta = constraints.theta_bw;

    if deployment.uavs.len() > constraints.k_max {
        report.fleet.push(format!(
            "{} UAVs exceed k_max = {}",
            deployment.uavs.len(),
            constraints.k_max
        ));
    }

    let mut seen: HashSet<usize> = HashSet::new();
    for (j, uav) in deployment.uavs.iter().enumerate() {
        if uav.id != j {
            report.fleet.push(format!("UAV at position {j} has id {}", uav.id));
        }
        for &user in &uav.served {
            if !seen.insert(user) {
                report
                    .association
                    .push(format!("user {user} served by more than one UAV"));
            }
            if deployment.association.get(&user) != Some(&uav.id) {
                report.association.push(format!(
                    "user {user} listed under UAV {} but associated with {:?}",
                    uav.id,
                    deployment.association.get(&user)
                ));
            }
            if !lookup.contains_key(&user) {
                report
                    .association
                    .push(format!("user {user} is not in the scenario"));
            }
        }
        if uav.served.len() > gamma {
            report.capacity.push(format!(
                "UAV {} serves {} users, capacity {gamma}",
                uav.id,
                uav.served.len()
            ));
        }
        let h = uav.pos.h;
        if !(h >= constraints.h_min && h <= constraints.h_max) {
            report.altitude.push(format!(
                "UAV {} at {h} m outside [{}, {}]",
                uav.id, constraints.h_min, constraints.h_max
            ));
        }
        let expected_r = coverage_radius(h, theta);
        if (uav.coverage.radius - expected_r).abs() > GEOM_EPS {
            report.footprint.push(format!(
                "UAV {} footprint {} m does not match altitude (expected {expected_r} m)",
                uav.id, uav.coverage.radius
            ));
        }
    }
    if seen.len() != deployment.association.len() {
        report.association.push(format!(
            "association lists {} users but UAVs serve {}",
            deployment.association.len(),
            seen.len()
        ));
    }

    if policy == QosPolicy::Sequential {
        let fleet = deployment.positions();
        let mut min_rate = f64::INFINITY;
        for (j, uav) in deployment.uavs.iter().enumerate() {
            let n = uav.served.len();
            for &user in &uav.served {
                let Some(pos) = lookup.get(&user) else { continue };
                if !uav.coverage.contains(pos) {
                    report.footprint.push(format!(
                        "user {user} lies outside the footprint of UAV {}",
                        uav.id
                    ));
                }
                match achievable_rate(pos, j, &fleet[..=j], n, params, theta) {
                    Ok(rate) => {
                        min_rate = min_rate.min(rate);
                        if rate < constraints.r_min_rate * (1.0 - RATE_RTOL) {
                            report.qos.push(format!(
                                "user {user} on UAV {} gets {rate:.0} bps < {}",
                                uav.id, constraints.r_min_rate
                            ));
                        }
                    }
                    Err(e) => report.qos.push(format!("user {user}: {e}")),
                }
            }
        }
        if min_rate.is_finite() {
            report.min_sequential_rate = Some(min_rate);
        }
    }
    report
}

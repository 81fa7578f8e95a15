//! Evaluation of a finished deployment: satisfaction, per-UAV load, Jain's
//! fairness over connection counts, and energy efficiency.
//!
//! Rates are recomputed here from positions alone with the complete fleet
//! interfering, independent of whatever the solver checked while building it.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::channel::{achievable_rate, ChannelParams, DeploymentConstraints};
use crate::deployment::Deployment;
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scenario::GroundUser;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricsReport {
    pub satisfaction: f64,
    pub loads: Vec<usize>,
    pub jain_index: f64,
    /// Set when every load is zero and the index is reported as 1.0.
    pub jain_degenerate: bool,
    /// bits per joule
    pub energy_efficiency: f64,
    /// bps
    pub total_throughput: f64,
    pub active_uavs: usize,
    pub n_users: usize,
    pub n_associated: usize,
    pub n_satisfied: usize,
    pub solve_time: f64,
}

fn positions_by_id(users: &[GroundUser]) -> HashMap<usize, Point2> {
    users.iter().map(|u| (u.id, u.pos)).collect()
}

/// Post-hoc rate of every associated user, keyed by user id.
pub fn user_rates(
    deployment: &Deployment,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<BTreeMap<usize, f64>> {
    let lookup = positions_by_id(users);
    let fleet = deployment.positions();
    let mut rates = BTreeMap::new();
    for uav in &deployment.uavs {
        let n = uav.served.len();
        for &user in &uav.served {
            let pos = lookup.get(&user).ok_or_else(|| {
                Error::Validation(format!("associated user {user} is not in the scenario"))
            })?;
            let r = achievable_rate(pos, uav.id, &fleet, n, params, constraints.theta_bw)?;
            rates.insert(user, r);
        }
    }
    Ok(rates)
}

/// Fraction of all users whose recomputed rate meets the QoS target.
pub fn satisfaction(
    deployment: &Deployment,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<f64> {
    if users.is_empty() {
        return Ok(0.0);
    }
    let rates = user_rates(deployment, users, constraints, params)?;
    let ok = rates.values().filter(|&&r| r >= constraints.r_min_rate).count();
    Ok(ok as f64 / users.len() as f64)
}

/// Jain's index over per-UAV connection counts.
///
/// All-zero loads have no defined index; 1.0 is returned for them.
pub fn jain_fairness(loads: &[usize]) -> Result<f64> {
    if loads.is_empty() {
        return Err(Error::InvalidParameter("fairness needs at least one UAV".into()));
    }
    let sum: f64 = loads.iter().map(|&l| l as f64).sum();
    let sum_sq: f64 = loads.iter().map(|&l| (l as f64) * (l as f64)).sum();
    if sum_sq == 0.0 {
        return Ok(1.0);
    }
    Ok(sum * sum / (loads.len() as f64 * sum_sq))
}

/// Aggregate throughput over aggregate power of the active fleet, bits/J.
pub fn energy_efficiency_from(
    total_throughput: f64,
    active_uavs: usize,
    params: &ChannelParams,
) -> Result<f64> {
    if active_uavs == 0 {
        return Err(Error::NoActiveUavs);
    }
    Ok(total_throughput / (active_uavs as f64 * (params.p_hover + params.p_t)))
}

pub fn energy_efficiency(
    deployment: &Deployment,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<f64> {
    let rates = user_rates(deployment, users, constraints, params)?;
    energy_efficiency_from(rates.values().sum(), deployment.uavs.len(), params)
}

pub fn evaluate(
    deployment: &Deployment,
    users: &[GroundUser],
    constraints: &DeploymentConstraints,
    params: &ChannelParams,
) -> Result<MetricsReport> {
    let rates = user_rates(deployment, users, constraints, params)?;
    let n_satisfied = rates.values().filter(|&&r| r >= constraints.r_min_rate).count();
    let total_throughput: f64 = rates.values().sum();
    let loads = deployment.loads();
    let active_uavs = deployment.uavs.len();
    let (jain_index, jain_degenerate) = if loads.iter().all(|&l| l == 0) {
        if !loads.is_empty() {
            log::warn!("all {} UAVs idle; fairness reported as 1.0", loads.len());
        }
        (1.0, true)
    } else {
        (jain_fairness(&loads)?, false)
    };
    let energy_efficiency = if active_uavs == 0 {
        0.0
    } else {
        energy_efficiency_from(total_throughput, active_uavs, params)?
    };
    Ok(MetricsReport {
        satisfaction: if users.is_empty() {
            0.0
        } else {
            n_satisfied as f64 / users.len() as f64
        },
        loads,
        jain_index,
        jain_degenerate,
        energy_efficiency,
        total_throughput,
        active_uavs,
        n_users: users.len(),
        n_associated: rates.len(),
        n_satisfied,
        solve_time: deployment.solve_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn jain_examples() {
        assert_eq!(jain_fairness(&[5, 5, 5, 5]).unwrap(), 1.0);
        assert_eq!(jain_fairness(&[1, 3]).unwrap(), 0.8);
        assert_relative_eq!(jain_fairness(&[9, 0, 0]).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        assert_eq!(jain_fairness(&[0, 0]).unwrap(), 1.0);
        assert!(jain_fairness(&[]).is_err());
    }

    #[test]
    fn ee_examples() {
        let p = ChannelParams::default();
        assert_relative_eq!(
            energy_efficiency_from(1e8, 1, &p).unwrap(),
            1e8 / 150.1,
            max_relative = 1e-12
        );
        assert_eq!(energy_efficiency_from(0.0, 3, &p).unwrap(), 0.0);
        let one = energy_efficiency_from(5e7, 2, &p).unwrap();
        let two = energy_efficiency_from(5e7, 4, &p).unwrap();
        assert_relative_eq!(one, 2.0 * two, max_relative = 1e-12);
        assert!(matches!(
            energy_efficiency_from(1.0, 0, &p),
            Err(Error::NoActiveUavs)
        ));
    }

    #[test]
    fn empty_fleet_scores_zero() {
        let users = vec![GroundUser {
            id: 0,
            pos: Point2::new(1.0, 1.0),
            vel: Point2::new(0.0, 0.0),
        }];
        let r = evaluate(
            &Deployment::empty(),
            &users,
            &DeploymentConstraints::default(),
            &ChannelParams::default(),
        )
        .unwrap();
        assert_eq!(r.satisfaction, 0.0);
        assert_eq!(r.energy_efficiency, 0.0);
        assert!(r.jain_degenerate);
    }
}

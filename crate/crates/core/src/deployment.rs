//! Deployment result shared by every placement algorithm, plus its JSON form.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Circle, Point2, Point3};

/// One deployed aerial base station.
#[derive(Debug, Clone, PartialEq)]
pub struct UavBs {
    pub id: usize,
    pub pos: Point3,
    pub coverage: Circle,
    /// Served user ids in admission order.
    pub served: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    /// UAVs in commit order; `uavs[j].id == j`.
    pub uavs: Vec<UavBs>,
    /// user id -> UAV id. Users without an entry are unserved.
    pub association: BTreeMap<usize, usize>,
    /// Wall-clock solve time, seconds.
    pub solve_time: f64,
}

impl Deployment {
    pub fn empty() -> Self {
        Deployment {
            uavs: Vec::new(),
            association: BTreeMap::new(),
            solve_time: 0.0,
        }
    }

    pub(crate) fn from_uavs(uavs: Vec<UavBs>) -> Self {
        let association = uavs
            .iter()
            .flat_map(|u| u.served.iter().map(move |&user| (user, u.id)))
            .collect();
        Deployment {
            uavs,
            association,
            solve_time: 0.0,
        }
    }

    pub fn positions(&self) -> Vec<Point3> {
        self.uavs.iter().map(|u| u.pos).collect()
    }

    pub fn loads(&self) -> Vec<usize> {
        self.uavs.iter().map(|u| u.served.len()).collect()
    }

    pub fn n_served(&self) -> usize {
        self.association.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&DeploymentRecord::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let record: DeploymentRecord = serde_json::from_str(text)?;
        record.try_into()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json()?).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

/// Knobs shared by every solver that are not part of the radio or
/// constraint model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Seed for the smallest-enclosing-circle permutation.
    pub sec_seed: u64,
    /// Seed for randomized baselines (initial centroids, sites, placements).
    pub seed: u64,
    /// Service area; baselines that sample positions fall back to the users'
    /// bounding box when absent.
    pub area: Option<crate::scenario::Area>,
    /// Pins K-Means and Voronoi UAVs to this altitude instead of the
    /// footprint-derived one.
    pub baseline_fixed_altitude: Option<f64>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            sec_seed: crate::geometry::DEFAULT_SEC_SEED,
            seed: 0,
            area: None,
            baseline_fixed_altitude: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UavRecord {
    id: usize,
    x: f64,
    y: f64,
    h: f64,
    r: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DeploymentRecord {
    uavs: Vec<UavRecord>,
    association: BTreeMap<usize, usize>,
    solve_time_s: f64,
}

impl From<&Deployment> for DeploymentRecord {
    fn from(d: &Deployment) -> Self {
        DeploymentRecord {
            uavs: d
                .uavs
                .iter()
                .map(|u| UavRecord {
                    id: u.id,
                    x: u.pos.x,
                    y: u.pos.y,
                    h: u.pos.h,
                    r: u.coverage.radius,
                })
                .collect(),
            association: d.association.clone(),
            solve_time_s: d.solve_time,
        }
    }
}

impl TryFrom<DeploymentRecord> for Deployment {
    type Error = Error;

    fn try_from(rec: DeploymentRecord) -> Result<Self> {
        let mut uavs: Vec<UavBs> = rec
            .uavs
            .iter()
            .map(|u| UavBs {
                id: u.id,
                pos: Point3::new(u.x, u.y, u.h),
                coverage: Circle {
                    center: Point2::new(u.x, u.y),
                    radius: u.r,
                },
                served: Vec::new(),
            })
            .collect();
        for (j, u) in uavs.iter().enumerate() {
            if u.id != j {
                return Err(Error::Validation(format!(
                    "UAV ids must be 0..K in order, found {} at position {j}",
                    u.id
                )));
            }
        }
        for (&user, &uav) in &rec.association {
            let slot = uavs.get_mut(uav).ok_or_else(|| {
                Error::Validation(format!("user {user} associated with unknown UAV {uav}"))
            })?;
            slot.served.push(user);
        }
        Ok(Deployment {
            uavs,
            association: rec.association,
            solve_time: rec.solve_time_s,
        })
    }
}

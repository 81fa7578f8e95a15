//! UAV base-station placement by perimeter peeling.
//!
//! [`scope`] is the placement algorithm: repeatedly seed a cluster on the
//! convex hull of the still-uncovered users, grow it nearest-to-centroid while
//! capacity, altitude and rate limits hold, and park a UAV over the cluster's
//! smallest enclosing circle. [`baselines`] holds the comparison placements,
//! [`metrics`] and [`validate`] judge a finished deployment, and [`harness`]
//! runs seeded parameter sweeps and latency measurements.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baselines;
pub mod channel;
pub mod deployment;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metrics;
pub mod par;
pub mod scenario;
pub mod scope;
pub mod validate;

pub use channel::{ChannelParams, DeploymentConstraints};
pub use deployment::{Deployment, SolverOptions, UavBs};
pub use error::{Error, Result};
pub use geometry::{Circle, Point2, Point3};
pub use scenario::{GroundUser, Scenario, ScenarioConfig};

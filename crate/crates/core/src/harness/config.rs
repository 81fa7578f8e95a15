//! JSON run configuration: `{scenario, channel, constraints, experiment}`.
//!
//! Every section is optional and every key defaults to the standard urban
//! setup; unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, DeploymentConstraints};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Scope,
    Ccs,
    KmeansScope,
    KmeansCcs,
    Voronoi,
    Random,
}

impl Algorithm {
    pub const ALL: [Algorithm; 6] = [
        Algorithm::Scope,
        Algorithm::Ccs,
        Algorithm::KmeansScope,
        Algorithm::KmeansCcs,
        Algorithm::Voronoi,
        Algorithm::Random,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::Scope => "scope",
            Algorithm::Ccs => "ccs",
            Algorithm::KmeansScope => "kmeans_scope",
            Algorithm::KmeansCcs => "kmeans_ccs",
            Algorithm::Voronoi => "voronoi",
            Algorithm::Random => "random",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown algorithm {s:?}; expected one of scope, ccs, kmeans_scope, kmeans_ccs, voronoi, random"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Number of users.
    Users,
    /// Minimum rate, Mbps.
    Qos,
    /// Gauss-Markov memory level.
    Alpha,
    /// Half-beamwidth, degrees.
    Beamwidth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioSection {
    pub area_width: f64,
    pub area_height: f64,
    pub n_users: usize,
    pub n_parents: usize,
    pub cluster_radius: f64,
    pub seed: u64,
    pub alpha: f64,
    pub mean_velocity: [f64; 2],
    pub noise_sigma: f64,
    pub dt: f64,
    /// Mobility slots applied to each snapshot before solving.
    pub mobility_steps: usize,
}

impl Default for ScenarioSection {
    fn default() -> Self {
        let s = ScenarioConfig::default();
        ScenarioSection {
            area_width: s.area_width,
            area_height: s.area_height,
            n_users: s.n_users,
            n_parents: s.n_parents,
            cluster_radius: s.cluster_radius,
            seed: s.seed,
            alpha: s.alpha,
            mean_velocity: [s.mean_velocity.x, s.mean_velocity.y],
            noise_sigma: s.noise_sigma,
            dt: s.dt,
            mobility_steps: 0,
        }
    }
}

impl ScenarioSection {
    pub fn to_config(&self) -> ScenarioConfig {
        ScenarioConfig {
            area_width: self.area_width,
            area_height: self.area_height,
            n_users: self.n_users,
            n_parents: self.n_parents,
            cluster_radius: self.cluster_radius,
            seed: self.seed,
            alpha: self.alpha,
            mean_velocity: Point2::new(self.mean_velocity[0], self.mean_velocity[1]),
            noise_sigma: self.noise_sigma,
            dt: self.dt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub a: f64,
    pub b: f64,
    /// dB
    pub eta_los: f64,
    /// dB
    pub eta_nlos: f64,
    /// Hz
    pub f_c: f64,
    /// Hz
    pub bandwidth: f64,
    /// W
    pub p_t: f64,
    /// W
    pub p_hover: f64,
    pub noise_dbm_per_hz: f64,
}

impl Default for ChannelSection {
    fn default() -> Self {
        let c = ChannelParams::default();
        ChannelSection {
            a: c.a,
            b: c.b,
            eta_los: c.eta_los,
            eta_nlos: c.eta_nlos,
            f_c: c.f_c,
            bandwidth: c.bandwidth,
            p_t: c.p_t,
            p_hover: c.p_hover,
            noise_dbm_per_hz: -174.0,
        }
    }
}

impl ChannelSection {
    pub fn to_params(&self) -> ChannelParams {
        ChannelParams {
            a: self.a,
            b: self.b,
            eta_los: self.eta_los,
            eta_nlos: self.eta_nlos,
            f_c: self.f_c,
            bandwidth: self.bandwidth,
            p_t: self.p_t,
            noise_density: 10f64.powf((self.noise_dbm_per_hz - 30.0) / 10.0),
            p_hover: self.p_hover,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConstraintsSection {
    /// m
    pub h_min: f64,
    /// m
    pub h_max: f64,
    pub theta_bw_deg: f64,
    /// bps
    pub r_min: f64,
    /// bps
    pub c_backhaul: f64,
    pub k_max: usize,
}

impl Default for ConstraintsSection {
    fn default() -> Self {
        let c = DeploymentConstraints::default();
        ConstraintsSection {
            h_min: c.h_min,
            h_max: c.h_max,
            theta_bw_deg: c.theta_bw.to_degrees(),
            r_min: c.r_min_rate,
            c_backhaul: c.c_backhaul,
            k_max: c.k_max,
        }
    }
}

impl ConstraintsSection {
    pub fn to_constraints(&self) -> DeploymentConstraints {
        DeploymentConstraints {
            h_min: self.h_min,
            h_max: self.h_max,
            theta_bw: self.theta_bw_deg.to_radians(),
            r_min_rate: self.r_min,
            c_backhaul: self.c_backhaul,
            k_max: self.k_max,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub sweep_axis: SweepAxis,
    pub sweep_values: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub trials: usize,
    pub output: PathBuf,
    /// Worker threads; `DEPLOY_WORKERS` overrides.
    pub workers: Option<usize>,
    pub sec_seed: u64,
    /// Pins K-Means and Voronoi UAVs to this altitude, m.
    pub baseline_fixed_altitude: Option<f64>,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            sweep_axis: SweepAxis::Users,
            sweep_values: vec![200.0, 400.0, 600.0, 800.0, 1000.0],
            algorithms: Algorithm::ALL.to_vec(),
            trials: 20,
            output: PathBuf::from("results.csv"),
            workers: None,
            sec_seed: crate::geometry::DEFAULT_SEC_SEED,
            baseline_fixed_altitude: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub scenario: ScenarioSection,
    pub channel: ChannelSection,
    pub constraints: ConstraintsSection,
    pub experiment: ExperimentSection,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.to_config().validate()?;
        self.channel.to_params().validate()?;
        self.constraints.to_constraints().validate()?;
        let e = &self.experiment;
        if e.trials < 1 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if e.sweep_values.is_empty() {
            return Err(Error::InvalidParameter("sweep_values is empty".into()));
        }
        if e.sweep_values.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidParameter(
                "sweep_values must be strictly ascending".into(),
            ));
        }
        if e.algorithms.is_empty() {
            return Err(Error::InvalidParameter("no algorithms selected".into()));
        }
        for &v in &e.sweep_values {
            self.apply(v, self.scenario.seed)?;
        }
        Ok(())
    }

    /// Scenario, channel and constraints for one sweep point and trial seed.
    pub fn apply(
        &self,
        value: f64,
        seed: u64,
    ) -> Result<(ScenarioConfig, ChannelParams, DeploymentConstraints)> {
        let mut scenario = self.scenario.to_config();
        scenario.seed = seed;
        let params = self.channel.to_params();
        let mut constraints = self.constraints.to_constraints();
        match self.experiment.sweep_axis {
            SweepAxis::Users => {
                if !(value >= 1.0 && value.fract() == 0.0) {
                    return Err(Error::InvalidParameter(format!(
                        "user count must be a positive integer, got {value}"
                    )));
                }
                scenario.n_users = value as usize;
            }
            SweepAxis::Qos => constraints.r_min_rate = value * 1e6,
            SweepAxis::Alpha => scenario.alpha = value,
            SweepAxis::Beamwidth => constraints.theta_bw = value.to_radians(),
        }
        scenario.validate()?;
        constraints.validate()?;
        Ok((scenario, params, constraints))
    }
}

//! Probabilistic air-to-ground channel and the beamwidth geometry tying a
//! UAV's altitude to its ground footprint.
//!
//! Link budget: elevation-angle sigmoid for the LoS probability, free-space
//! loss plus an LoS/NLoS excess term, averaged by that probability. Rates are
//! Shannon rates over an equal split of the cell bandwidth, with every other
//! UAV whose footprint covers the user interfering at full power.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point2, Point3, GEOM_EPS};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Thermal noise floor, -174 dBm/Hz, in W/Hz.
pub const THERMAL_NOISE_W_PER_HZ: f64 = 3.981_071_705_534_969e-21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Sigmoid constant `a` of the LoS probability.
    pub a: f64,
    /// Sigmoid constant `b` of the LoS probability.
    pub b: f64,
    /// Excess LoS attenuation, dB.
    pub eta_los: f64,
    /// Excess NLoS attenuation, dB.
    pub eta_nlos: f64,
    /// Carrier frequency, Hz.
    pub f_c: f64,
    /// System bandwidth per UAV, Hz.
    pub bandwidth: f64,
    /// Transmit power, W.
    pub p_t: f64,
    /// Noise power spectral density, W/Hz.
    pub noise_density: f64,
    /// Average hovering power, W.
    pub p_hover: f64,
}

impl Default for ChannelParams {
    /// Urban constants with a 2 GHz, 20 MHz carrier.
    fn default() -> Self {
        ChannelParams {
            a: 12.08,
            b: 0.11,
            eta_los: 1.6,
            eta_nlos: 23.0,
            f_c: 2e9,
            bandwidth: 20e6,
            p_t: 0.1,
            noise_density: THERMAL_NOISE_W_PER_HZ,
            p_hover: 150.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("a", self.a),
            ("b", self.b),
            ("f_c", self.f_c),
            ("bandwidth", self.bandwidth),
            ("p_t", self.p_t),
            ("noise_density", self.noise_density),
            ("p_hover", self.p_hover),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(self.eta_nlos >= self.eta_los) {
            return Err(Error::InvalidParameter(format!(
                "eta_nlos ({}) must be >= eta_los ({})",
                self.eta_nlos, self.eta_los
            )));
        }
        Ok(())
    }
}

/// Altitude limits, antenna beamwidth, QoS target, backhaul and fleet size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeploymentConstraints {
    /// Minimum flight altitude, m.
    pub h_min: f64,
    /// Maximum flight altitude, m.
    pub h_max: f64,
    /// Half-power half-beamwidth, radians.
    pub theta_bw: f64,
    /// Per-user minimum rate, bps.
    pub r_min_rate: f64,
    /// Per-UAV backhaul capacity, bps.
    pub c_backhaul: f64,
    /// Number of UAVs available.
    pub k_max: usize,
}

impl Default for DeploymentConstraints {
    fn default() -> Self {
        DeploymentConstraints {
            h_min: 10.0,
            h_max: 120.0,
            theta_bw: 45f64.to_radians(),
            r_min_rate: 2e6,
            c_backhaul: 150e6,
            k_max: 60,
        }
    }
}

impl DeploymentConstraints {
    /// Users one UAV can carry: `floor(c_backhaul / r_min_rate)`.
    pub fn gamma_max(&self) -> usize {
        // guard against 150e6 / 2e6 landing a hair under an integer
        let ratio = self.c_backhaul / self.r_min_rate;
        (ratio * (1.0 + 1e-12)).floor() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.h_min > 0.0 && self.h_min <= self.h_max && self.h_max.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < h_min <= h_max, got h_min={} h_max={}",
                self.h_min, self.h_max
            )));
        }
        if !(self.theta_bw > 0.0 && self.theta_bw < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidParameter(format!(
                "theta_bw must lie in (0, pi/2), got {}",
                self.theta_bw
            )));
        }
        if !(self.r_min_rate > 0.0 && self.c_backhaul > 0.0) {
            return Err(Error::InvalidParameter(
                "r_min_rate and c_backhaul must be > 0".into(),
            ));
        }
        if self.gamma_max() < 1 {
            return Err(Error::InvalidParameter(format!(
                "backhaul {} cannot carry a single user at {} bps",
                self.c_backhaul, self.r_min_rate
            )));
        }
        if self.k_max < 1 {
            return Err(Error::InvalidParameter("k_max must be >= 1".into()));
        }
        Ok(())
    }
}

/// Elevation angle from user to UAV, degrees in (0, 90].
pub fn elevation_angle_deg(uav: &Point3, user: &Point2) -> Result<f64> {
    let d = distance_3d(uav, user);
    if d <= 0.0 || uav.h <= 0.0 {
        return Err(Error::DegenerateGeometry("UAV and user co-located"));
    }
    Ok((uav.h / d).min(1.0).asin().to_degrees())
}

pub fn distance_3d(uav: &Point3, user: &Point2) -> f64 {
    let dx = uav.x - user.x;
    let dy = uav.y - user.y;
    (dx * dx + dy * dy + uav.h * uav.h).sqrt()
}

pub fn los_probability(theta_deg: f64, params: &ChannelParams) -> f64 {
    1.0 / (1.0 + params.a * (-params.b * (theta_deg - params.a)).exp())
}

/// Free-space term `20 log10(4 pi f_c d / c)`, dB.
pub fn free_space_loss_db(distance_3d: f64, f_c: f64) -> f64 {
    20.0 * (4.0 * std::f64::consts::PI * f_c * distance_3d / SPEED_OF_LIGHT).log10()
}

/// LoS-probability-weighted path loss, dB.
pub fn mean_path_loss_db(distance_3d: f64, theta_deg: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance_3d > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be > 0, got {distance_3d}"
        )));
    }
    let fspl = free_space_loss_db(distance_3d, params.f_c);
    let p_los = los_probability(theta_deg, params);
    Ok(fspl + p_los * params.eta_los + (1.0 - p_los) * params.eta_nlos)
}

pub fn link_loss_db(uav: &Point3, user: &Point2, params: &ChannelParams) -> Result<f64> {
    let theta = elevation_angle_deg(uav, user)?;
    mean_path_loss_db(distance_3d(uav, user), theta, params)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Received power at `user` from a UAV transmitting at `params.p_t`, W.
pub fn received_power(uav: &Point3, user: &Point2, params: &ChannelParams) -> Result<f64> {
    Ok(params.p_t * db_to_linear(-link_loss_db(uav, user, params)?))
}

/// Ground footprint radius for a UAV at altitude `h`.
pub fn coverage_radius(h: f64, theta_bw: f64) -> f64 {
    h * theta_bw.tan()
}

/// Lowest altitude whose footprint covers radius `r_c`, floored at `h_min`.
pub fn required_altitude(r_c: f64, theta_bw: f64, h_min: f64) -> f64 {
    h_min.max(r_c / theta_bw.tan())
}

/// Whether `user` lies inside the footprint of a UAV at `uav`.
pub fn in_footprint(uav: &Point3, user: &Point2, theta_bw: f64) -> bool {
    uav.ground().distance(user) <= coverage_radius(uav.h, theta_bw) + GEOM_EPS
}

/// Downlink SINR of `user` served by `uavs[serving]`.
///
/// Every other UAV whose footprint contains the user interferes at full
/// transmit power; UAVs that do not cover the user contribute nothing.
/// Noise is integrated over `bandwidth_share`.
pub fn sinr(
    user: &Point2,
    serving: usize,
    uavs: &[Point3],
    params: &ChannelParams,
    theta_bw: f64,
    bandwidth_share: f64,
) -> Result<f64> {
    let serving_pos = uavs.get(serving).ok_or(Error::InvalidIndex {
        index: serving,
        len: uavs.len(),
    })?;
    if !(bandwidth_share > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "bandwidth share must be > 0, got {bandwidth_share}"
        )));
    }
    let signal = received_power(serving_pos, user, params)?;
    let mut interference = 0.0;
    for (k, uav) in uavs.iter().enumerate() {
        if k != serving && in_footprint(uav, user, theta_bw) {
            interference += received_power(uav, user, params)?;
        }
    }
    Ok(signal / (interference + params.noise_density * bandwidth_share))
}

/// Shannon rate over a bandwidth share, bps.
pub fn shannon_rate(bandwidth_share: f64, sinr: f64) -> f64 {
    bandwidth_share * (1.0 + sinr).log2()
}

/// Rate of `user` when `uavs[serving]` splits the band equally among
/// `n_served` users (this one included).
pub fn achievable_rate(
    user: &Point2,
    serving: usize,
    uavs: &[Point3],
    n_served: usize,
    params: &ChannelParams,
    theta_bw: f64,
) -> Result<f64> {
    let share = params.bandwidth / n_served.max(1) as f64;
    let s = sinr(user, serving, uavs, params, theta_bw, share)?;
    Ok(shannon_rate(share, s))
}

//! Ground-user snapshots: Matérn cluster placement and Gauss-Markov mobility.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point2;

// Mixed into the scenario seed so mobility noise is independent of placement.
const MOBILITY_STREAM: u64 = 0x6d6f_6269_6c69_7479;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "UserRecord", into = "UserRecord")]
pub struct GroundUser {
    pub id: usize,
    pub pos: Point2,
    /// Velocity, m/s.
    pub vel: Point2,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct UserRecord {
    id: usize,
    x: f64,
    y: f64,
    #[serde(default)]
    vx: f64,
    #[serde(default)]
    vy: f64,
}

impl From<UserRecord> for GroundUser {
    fn from(r: UserRecord) -> Self {
        GroundUser {
            id: r.id,
            pos: Point2::new(r.x, r.y),
            vel: Point2::new(r.vx, r.vy),
        }
    }
}

impl From<GroundUser> for UserRecord {
    fn from(u: GroundUser) -> Self {
        UserRecord {
            id: u.id,
            x: u.pos.x,
            y: u.pos.y,
            vx: u.vel.x,
            vy: u.vel.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Area {
    pub width: f64,
    pub height: f64,
}

impl Area {
    pub fn contains(&self, p: &Point2) -> bool {
        p.x >= 0.0 && p.x <= self.width && p.y >= 0.0 && p.y <= self.height
    }

    pub fn center(&self) -> Point2 {
        Point2::new(self.width / 2.0, self.height / 2.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub area_width: f64,
    pub area_height: f64,
    pub n_users: usize,
    /// Number of Matérn parent points.
    pub n_parents: usize,
    /// Radius of the disk children are scattered in around a parent, m.
    pub cluster_radius: f64,
    pub seed: u64,
    /// Gauss-Markov memory level in [0, 1].
    pub alpha: f64,
    /// Asymptotic mean velocity, m/s.
    pub mean_velocity: Point2,
    /// Per-axis standard deviation of the velocity innovation, m/s.
    pub noise_sigma: f64,
    /// Slot duration, s.
    pub dt: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            area_width: 400.0,
            area_height: 400.0,
            n_users: 600,
            n_parents: 8,
            cluster_radius: 40.0,
            seed: 1,
            alpha: 0.8,
            mean_velocity: Point2::new(0.0, 0.0),
            noise_sigma: 1.0,
            dt: 1.0,
        }
    }
}

impl ScenarioConfig {
    pub fn area(&self) -> Area {
        Area {
            width: self.area_width,
            height: self.area_height,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.area_width > 0.0 && self.area_height > 0.0) {
            return bad(format!(
                "area must be positive, got {}x{}",
                self.area_width, self.area_height
            ));
        }
        if self.n_users < 1 || self.n_parents < 1 {
            return bad("n_users and n_parents must be >= 1".into());
        }
        if !(self.cluster_radius > 0.0) {
            return bad(format!("cluster_radius must be > 0, got {}", self.cluster_radius));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return bad(format!("alpha must lie in [0, 1], got {}", self.alpha));
        }
        if !(self.dt > 0.0) || !(self.noise_sigma >= 0.0) {
            return bad("dt must be > 0 and noise_sigma >= 0".into());
        }
        Ok(())
    }
}

/// A frozen user topology, as read from or written to scenario JSON.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub area: Area,
    pub seed: u64,
    pub users: Vec<GroundUser>,
}

impl Scenario {
    pub fn generate(config: &ScenarioConfig) -> Result<Self> {
        Ok(Scenario {
            area: config.area(),
            seed: config.seed,
            users: generate_users(config)?,
        })
    }

    pub fn positions(&self) -> Vec<Point2> {
        self.users.iter().map(|u| u.pos).collect()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let scenario: Scenario = serde_json::from_str(&text)?;
        scenario.check()?;
        Ok(scenario)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    /// Rejects empty user lists, duplicate ids, and non-finite coordinates.
    pub fn check(&self) -> Result<()> {
        if self.users.is_empty() {
            return Err(Error::InvalidParameter("scenario has no users".into()));
        }
        let mut ids: Vec<usize> = self.users.iter().map(|u| u.id).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("duplicate user id".into()));
        }
        for u in &self.users {
            Point2::try_new(u.pos.x, u.pos.y)?;
        }
        Ok(())
    }
}

fn uniform_in_disk<R: Rng>(rng: &mut R, center: Point2, radius: f64) -> Point2 {
    let r = radius * rng.random::<f64>().sqrt();
    let phi = std::f64::consts::TAU * rng.random::<f64>();
    Point2::new(center.x + r * phi.cos(), center.y + r * phi.sin())
}

/// Matérn cluster process snapshot with exactly `n_users` users.
///
/// Parents are uniform in the area; each user picks a parent uniformly and
/// lands uniformly in the disk around it, redrawn until it falls inside the
/// area. Initial velocities are drawn from the stationary mobility law.
pub fn generate_users(config: &ScenarioConfig) -> Result<Vec<GroundUser>> {
    config.validate()?;
    let area = config.area();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let parents: Vec<Point2> = (0..config.n_parents)
        .map(|_| {
            Point2::new(
                rng.random::<f64>() * area.width,
                rng.random::<f64>() * area.height,
            )
        })
        .collect();
    let noise = velocity_noise(config)?;

    let users = (0..config.n_users)
        .map(|id| {
            let parent = parents[rng.random_range(0..parents.len())];
            let pos = loop {
                let p = uniform_in_disk(&mut rng, parent, config.cluster_radius);
                if area.contains(&p) {
                    break p;
                }
            };
            let vel = Point2::new(
                config.mean_velocity.x + noise.sample(&mut rng),
                config.mean_velocity.y + noise.sample(&mut rng),
            );
            GroundUser { id, pos, vel }
        })
        .collect();
    Ok(users)
}

fn velocity_noise(config: &ScenarioConfig) -> Result<Normal<f64>> {
    Normal::new(0.0, config.noise_sigma)
        .map_err(|e| Error::InvalidParameter(format!("noise_sigma: {e}")))
}

// Folds `x` back into [0, len]; returns the folded value and whether the
// direction of travel flipped.
fn reflect(mut x: f64, len: f64) -> (f64, bool) {
    let mut flipped = false;
    while !(0.0..=len).contains(&x) {
        if x < 0.0 {
            x = -x;
        } else {
            x = 2.0 * len - x;
        }
        flipped = !flipped;
    }
    (x, flipped)
}

/// Advances every user by one slot of Gauss-Markov mobility.
///
/// Positions move with the previous velocity; velocities then follow the
/// AR(1) update. Users hitting a wall are reflected and the corresponding
/// velocity component is negated.
pub fn step_mobility<R: Rng>(
    users: &mut [GroundUser],
    config: &ScenarioConfig,
    rng: &mut R,
) -> Result<()> {
    config.validate()?;
    let area = config.area();
    let noise = velocity_noise(config)?;
    let alpha = config.alpha;
    let innovation = (1.0 - alpha * alpha).max(0.0).sqrt();
    for u in users.iter_mut() {
        let moved = Point2::new(u.pos.x + u.vel.x * config.dt, u.pos.y + u.vel.y * config.dt);
        let nx = noise.sample(rng);
        let ny = noise.sample(rng);
        let mut vx = alpha * u.vel.x + (1.0 - alpha) * config.mean_velocity.x + innovation * nx;
        let mut vy = alpha * u.vel.y + (1.0 - alpha) * config.mean_velocity.y + innovation * ny;
        let (x, flip_x) = reflect(moved.x, area.width);
        let (y, flip_y) = reflect(moved.y, area.height);
        if flip_x {
            vx = -vx;
        }
        if flip_y {
            vy = -vy;
        }
        u.pos = Point2::new(x, y);
        u.vel = Point2::new(vx, vy);
    }
    Ok(())
}

/// Seeded mobility driver; the same config always yields the same trajectory.
pub struct Mobility {
    config: ScenarioConfig,
    rng: ChaCha8Rng,
}

impl Mobility {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        Ok(Mobility {
            config: config.clone(),
            rng: ChaCha8Rng::seed_from_u64(config.seed ^ MOBILITY_STREAM),
        })
    }

    pub fn step(&mut self, users: &mut [GroundUser]) -> Result<()> {
        step_mobility(users, &self.config, &mut self.rng)
    }
}

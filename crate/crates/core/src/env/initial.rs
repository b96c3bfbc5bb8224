use serde::{Deserialize, Serialize};

use super::{EpisodeConfig, GravityMode};
use crate::asteroid::{sample_asteroid, AsteroidAttitude, AsteroidModel, GravityField};
use crate::math::{cone_direction, orthogonal_unit, Mat3, Quaternion, SimRng, Vec3};
use crate::seeker::SensorBias;
use crate::spacecraft::{apply_actuator_failure, box_inertia, FuelModel, SpacecraftState, ThrusterConfig};

const MAX_RESAMPLES: usize = 1000;

/// Everything drawn at the start of an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeSetup {
    pub asteroid: AsteroidModel,
    pub gravity: GravityField,
    pub asteroid_attitude: AsteroidAttitude,
    /// Landing site on the surface, asteroid frame.
    pub site: Vec3,
    /// Outward unit normal at the site.
    pub normal: Vec3,
    /// Point `target_offset` above the site along the normal.
    pub target: Vec3,
    pub state: SpacecraftState,
    pub thrusters: ThrusterConfig,
    pub fuel: FuelModel,
    pub bias: SensorBias,
}

/// Attitude `[BN]` whose −z axis points along `los` with roll `roll` about it.
pub fn boresight_attitude(los: &Vec3, roll: f64) -> Quaternion {
    let z = -los.normalize();
    let x0 = orthogonal_unit(&z);
    let (s, c) = roll.sin_cos();
    let x = x0 * c + z.cross(&x0) * s;
    let y = z.cross(&x);
    let dcm = Mat3::from_rows(&[x.transpose(), y.transpose(), z.transpose()]);
    Quaternion::from_dcm(&dcm).normalize()
}

/// Draw position, velocity, attitude, rates, mass and CoM for a spacecraft
/// approaching `target` over `site` on `asteroid`.
///
/// The asteroid frame is taken to coincide with the inertial frame at the
/// start of the episode.
pub fn sample_initial_conditions(
    rng: &mut SimRng,
    cfg: &EpisodeConfig,
    asteroid: &AsteroidModel,
    site: &Vec3,
    target: &Vec3,
) -> SpacecraftState {
    let ic = &cfg.initial;
    let r_at = if target.norm() > 0.0 { target.normalize() } else { Vec3::z() };
    let mut r = Vec3::zeros();
    let mut r_ts = r_at;
    for _ in 0..MAX_RESAMPLES {
        let range = ic.range.sample(rng);
        let offset = ic.offset_deg.sample(rng).to_radians();
        let phi = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
        r_ts = cone_direction(&r_at, offset, phi);
        r = target + range * r_ts;
        if !asteroid.contains(&r) {
            break;
        }
    }

    let speed = ic.speed.sample(rng);
    let heading = ic.heading_deg.sample(rng).to_radians();
    let phi = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
    let v = speed * cone_direction(&-r_ts, heading, phi);

    let los = site - r;
    let att_err = ic.attitude_deg.sample(rng).to_radians();
    let phi = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
    let boresight = cone_direction(&los, att_err, phi);
    let roll = rng.uniform(-std::f64::consts::PI, std::f64::consts::PI);
    let q = boresight_attitude(&boresight, roll);

    let omega = Vec3::new(ic.omega.sample(rng), ic.omega.sample(rng), ic.omega.sample(rng));
    let mass = ic.mass.sample(rng);
    let r_com = Vec3::new(ic.com.sample(rng), ic.com.sample(rng), ic.com.sample(rng));
    let side = cfg.vehicle.side;
    SpacecraftState {
        r,
        v,
        q,
        omega,
        mass,
        r_com,
        inertia: box_inertia(mass, side, side, side),
        inertia_rate: Mat3::zeros(),
    }
}

/// Draw a complete episode: asteroid, site, spacecraft and adaptation
/// parameters, in a fixed order so a seed fully determines the result.
pub fn sample_episode(rng: &mut SimRng, cfg: &EpisodeConfig) -> EpisodeSetup {
    let asteroid = sample_asteroid(rng, &cfg.asteroid);
    let gravity = match &cfg.gravity {
        GravityMode::Ellipsoid => GravityField::Ellipsoid,
        GravityMode::Sphere { mass } => GravityField::Sphere {
            mass: mass.sample(rng),
        },
    };
    let site = asteroid.sample_surface_point(rng);
    let normal = asteroid.surface_normal(&site);
    let target = site + cfg.target_offset * normal;
    let state = sample_initial_conditions(rng, cfg, &asteroid, &site, &target);
    let thrusters = apply_actuator_failure(
        &cfg.vehicle.thrusters(),
        rng,
        cfg.actuator.p_fail,
        cfg.actuator.f_min,
        cfg.actuator.f_max,
    );
    let fuel = FuelModel::sample(
        rng,
        state.r_com,
        cfg.vehicle.com_drift_rate,
        cfg.vehicle.com_drift_max,
    );
    let bias = SensorBias::sample(rng, &cfg.sensor);
    EpisodeSetup {
        asteroid,
        gravity,
        asteroid_attitude: AsteroidAttitude::default(),
        site,
        normal,
        target,
        state,
        thrusters,
        fuel,
        bias,
    }
}

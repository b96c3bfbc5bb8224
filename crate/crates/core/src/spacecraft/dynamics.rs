use serde::{Deserialize, Serialize};

use crate::math::{Mat3, Quaternion, Vec3};
use crate::{Error, Result};

/// Full translational/rotational state of the vehicle.
///
/// Position and velocity are expressed in the asteroid-fixed rotating frame;
/// the attitude `q` is `[BN]`, inertial to body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacecraftState {
    pub r: Vec3,
    pub v: Vec3,
    pub q: Quaternion,
    /// Body angular velocity, rad/s.
    pub omega: Vec3,
    pub mass: f64,
    /// Centre of mass in body coordinates, m.
    pub r_com: Vec3,
    pub inertia: Mat3,
    pub inertia_rate: Mat3,
}

/// Euler's equations with a time-varying inertia tensor:
/// `J ω̇ = −ω × (J ω) − J̇ ω + L_B + L_env`.
pub fn rotational_dynamics(
    omega: &Vec3,
    inertia: &Mat3,
    inertia_rate: &Mat3,
    torque: &Vec3,
    env_torque: &Vec3,
) -> Result<Vec3> {
    let rhs = -omega.cross(&(inertia * omega)) - inertia_rate * omega + torque + env_torque;
    let lu = inertia.lu();
    lu.solve(&rhs)
        .filter(|w| w.iter().all(|x| x.is_finite()))
        .ok_or_else(|| Error::Numeric("singular inertia tensor".into()))
}

/// Acceleration in the rotating asteroid frame:
/// `v̇ = F/m + a_env + g + 2 v × ω_a + (ω_a × r) × ω_a`.
///
/// `force` must already be expressed in the asteroid frame and `gravity` is
/// the attraction (pointing toward the body). The Euler term `−ω̇_a × r` is
/// not included.
pub fn translational_dynamics(
    r: &Vec3,
    v: &Vec3,
    force: &Vec3,
    mass: f64,
    env_accel: &Vec3,
    gravity: &Vec3,
    omega_a: &Vec3,
) -> Vec3 {
    force / mass + env_accel + gravity + 2.0 * v.cross(omega_a) + omega_a.cross(r).cross(omega_a)
}

//! Spacecraft rigid-body model.
//!
//! Twelve on/off thrusters sit on the faces of a uniform cube. Each thruster
//! pushes along the inward normal of its face, so a same-face pair translates
//! without rotation and a single thruster adds a pitch, yaw or roll moment.

mod dynamics;
mod mass;
mod thrusters;

pub use dynamics::{rotational_dynamics, translational_dynamics, SpacecraftState};
pub use mass::{box_inertia, mass_flow, FuelModel, G_REF};
pub use thrusters::{
    apply_actuator_failure, body_force_torque, body_to_inertial, ThrusterCommand, ThrusterConfig,
    NUM_THRUSTERS, TABLE_POSITIONS,
};

use serde::{Deserialize, Serialize};

/// Physical parameters of a vehicle variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleParams {
    /// Cube edge length, m.
    pub side: f64,
    /// Nominal thrust of one thruster, N.
    pub thrust: f64,
    /// Specific impulse, s.
    pub isp: f64,
    /// Mass below which thrust is unavailable, kg.
    pub dry_mass: f64,
    /// Cumulative CoM drift per kg of propellant burned, m/kg.
    pub com_drift_rate: f64,
    /// Cap on the drift magnitude, m.
    pub com_drift_max: f64,
}

impl Default for VehicleParams {
    fn default() -> Self {
        Self::spacecraft()
    }
}

impl VehicleParams {
    /// The 2 m cube with 1 N thrusters.
    pub fn spacecraft() -> Self {
        Self {
            side: 2.0,
            thrust: 1.0,
            isp: 225.0,
            dry_mass: 400.0,
            com_drift_rate: 0.02,
            com_drift_max: 0.10,
        }
    }

    /// The 20 cm, 5 kg lander with 10 mN thrusters; lengths scale by 1/10.
    pub fn small_lander() -> Self {
        Self {
            side: 0.2,
            thrust: 0.01,
            isp: 225.0,
            dry_mass: 4.0,
            com_drift_rate: 0.2,
            com_drift_max: 0.01,
        }
    }

    /// Thruster layout scaled from the 2 m reference geometry.
    pub fn thrusters(&self) -> ThrusterConfig {
        ThrusterConfig::scaled(self.side / 2.0, self.thrust)
    }
}

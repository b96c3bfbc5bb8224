use serde::{Deserialize, Serialize};

use super::{ThrusterCommand, ThrusterConfig};
use crate::math::{Mat3, SimRng, Vec3};

/// Reference gravity for the rocket equation, m/s².
pub const G_REF: f64 = 9.8;

/// Inertia of a uniform box of height `h`, width `w`, depth `d`:
/// `m/12 · diag(h² + d², w² + d², w² + h²)`.
pub fn box_inertia(mass: f64, h: f64, w: f64, d: f64) -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(h * h + d * d, w * w + d * d, w * w + h * h)) * (mass / 12.0)
}

/// Propellant mass rate `ṁ = −Σ‖F⁽ⁱ⁾‖ / (I_sp g_ref)` for the fired thrusters.
pub fn mass_flow(cmd: &ThrusterCommand, cfg: &ThrusterConfig, isp: f64) -> f64 {
    let total: f64 = cmd
        .iter()
        .enumerate()
        .filter(|(_, &on)| on)
        .map(|(i, _)| cfg.delivered(i))
        .sum();
    -total / (isp * G_REF)
}

/// Linear centre-of-mass drift with burned propellant.
///
/// The CoM starts at a per-episode offset and moves along a per-episode unit
/// direction by `rate` metres per kg burned, saturating at `max_excursion`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FuelModel {
    pub initial_com: Vec3,
    pub direction: Vec3,
    pub rate: f64,
    pub max_excursion: f64,
}

impl FuelModel {
    pub fn fixed(initial_com: Vec3) -> Self {
        Self {
            initial_com,
            direction: Vec3::x(),
            rate: 0.0,
            max_excursion: 0.0,
        }
    }

    pub fn sample(rng: &mut SimRng, initial_com: Vec3, rate: f64, max_excursion: f64) -> Self {
        Self {
            initial_com,
            direction: rng.unit_vector(),
            rate,
            max_excursion,
        }
    }

    pub fn com(&self, burned: f64) -> Vec3 {
        let shift = (self.rate * burned.max(0.0)).min(self.max_excursion);
        self.initial_com + self.direction * shift
    }

    /// CoM, inertia and inertia rate after the vehicle has burned `burned` kg
    /// in total, given its inertia one dynamics step `dt` earlier.
    pub fn update(
        &self,
        burned: f64,
        mass: f64,
        side: f64,
        previous_inertia: &Mat3,
        dt: f64,
    ) -> (Vec3, Mat3, Mat3) {
        let inertia = box_inertia(mass, side, side, side);
        let rate = if dt > 0.0 {
            (inertia - previous_inertia) / dt
        } else {
            Mat3::zeros()
        };
        (self.com(burned), inertia, rate)
    }
}

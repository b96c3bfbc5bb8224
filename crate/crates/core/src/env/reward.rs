use serde::{Deserialize, Serialize};

use super::{LandingThresholds, RewardParams};
use crate::math::Vec3;
use crate::spacecraft::{ThrusterCommand, NUM_THRUSTERS};

/// Map raw policy outputs to thruster flags; only strictly positive values
/// fire.
pub fn discretize_action(u: &[f64]) -> ThrusterCommand {
    assert_eq!(u.len(), NUM_THRUSTERS, "action must have one entry per thruster");
    std::array::from_fn(|i| u[i] > 0.0)
}

/// Seeker-angle tracking error `‖(θ_u, θ_v)‖`.
pub fn seeker_error(theta_u: f64, theta_v: f64) -> f64 {
    theta_u.hypot(theta_v)
}

/// Per-step reward. `thrust_fraction` is the commanded thrust sum divided by
/// the single-thruster maximum.
pub fn step_reward(
    p: &RewardParams,
    v_error: f64,
    s_error: f64,
    thrust_fraction: f64,
    good_landing: bool,
    violation: bool,
) -> f64 {
    let mut r = p.alpha * v_error.abs() + p.beta * s_error + p.gamma * thrust_fraction + p.eta;
    if good_landing {
        r += p.zeta;
    }
    if violation {
        r += p.kappa;
    }
    r
}

/// Terminal errors measured against the target point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LandingMetrics {
    pub miss: f64,
    pub speed: f64,
    pub max_omega: f64,
    pub good: bool,
}

pub fn classify_landing(
    r: &Vec3,
    v: &Vec3,
    omega: &Vec3,
    target: &Vec3,
    thresholds: &LandingThresholds,
) -> LandingMetrics {
    let miss = (r - target).norm();
    let speed = v.norm();
    let max_omega = omega.amax();
    LandingMetrics {
        miss,
        speed,
        max_omega,
        good: miss <= thresholds.miss && speed <= thresholds.speed && max_omega <= thresholds.omega,
    }
}

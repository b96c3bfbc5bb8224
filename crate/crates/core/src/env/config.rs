use serde::{Deserialize, Serialize};

use crate::asteroid::{AsteroidRanges, Range};
use crate::math::Vec3;
use crate::seeker::{ObservationScales, SensorRanges, VelocityReferenceParams};
use crate::spacecraft::VehicleParams;
use crate::{Error, Result};

/// Initial-condition dispersions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InitialRanges {
    /// Distance from the target point, m.
    pub range: Range,
    /// Angle between target→spacecraft and centre→target, degrees.
    pub offset_deg: Range,
    /// Speed in the asteroid frame, m/s.
    pub speed: Range,
    /// Angle between velocity and the ideal heading, degrees.
    pub heading_deg: Range,
    /// Angle between body −z and the line of sight, degrees.
    pub attitude_deg: Range,
    /// Per-component body rate, rad/s.
    pub omega: Range,
    /// Initial mass, kg.
    pub mass: Range,
    /// Per-component initial centre-of-mass offset, m.
    pub com: Range,
}

impl Default for InitialRanges {
    fn default() -> Self {
        Self {
            range: Range::new(800.0, 1000.0),
            offset_deg: Range::new(0.0, 45.0),
            speed: Range::new(0.05, 0.10),
            heading_deg: Range::new(0.0, 22.5),
            attitude_deg: Range::new(0.0, 11.3),
            omega: Range::new(-0.05, 0.05),
            mass: Range::new(450.0, 500.0),
            com: Range::new(-0.10, 0.10),
        }
    }
}

impl InitialRanges {
    pub fn validate(&self) -> Result<()> {
        self.range.validate("initial.range")?;
        self.offset_deg.validate("initial.offset_deg")?;
        self.speed.validate("initial.speed")?;
        self.heading_deg.validate("initial.heading_deg")?;
        self.attitude_deg.validate("initial.attitude_deg")?;
        self.omega.validate("initial.omega")?;
        self.mass.validate("initial.mass")?;
        self.com.validate("initial.com")?;
        if self.range.min <= 0.0 || self.mass.min <= 0.0 {
            return Err(Error::Config("initial range and mass must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ActuatorFailure {
    pub p_fail: f64,
    pub f_min: f64,
    pub f_max: f64,
}

impl Default for ActuatorFailure {
    fn default() -> Self {
        Self {
            p_fail: 0.5,
            f_min: 0.5,
            f_max: 1.0,
        }
    }
}

impl ActuatorFailure {
    pub fn none() -> Self {
        Self {
            p_fail: 0.0,
            f_min: 1.0,
            f_max: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_fail)
            || !(0.0 <= self.f_min && self.f_min <= self.f_max && self.f_max <= 1.0)
        {
            return Err(Error::Config(
                "actuator failure needs 0 ≤ p_fail ≤ 1 and 0 ≤ f_min ≤ f_max ≤ 1".into(),
            ));
        }
        Ok(())
    }
}

/// Weights of the per-step reward.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardParams {
    /// Weight on `|v_error|`.
    pub alpha: f64,
    /// Weight on the seeker-angle error norm.
    pub beta: f64,
    /// Weight on the commanded thrust sum over single-thruster thrust.
    pub gamma: f64,
    /// Per-step bonus.
    pub eta: f64,
    /// Good-landing bonus.
    pub zeta: f64,
    /// Constraint-violation penalty.
    pub kappa: f64,
}

impl Default for RewardParams {
    fn default() -> Self {
        Self {
            alpha: -0.5,
            beta: -0.5,
            gamma: -0.05,
            eta: 0.01,
            zeta: 10.0,
            kappa: -50.0,
        }
    }
}

/// Terminal criteria for a good landing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LandingThresholds {
    pub miss: f64,
    pub speed: f64,
    pub omega: f64,
}

impl Default for LandingThresholds {
    fn default() -> Self {
        Self {
            miss: 1.0,
            speed: 0.1,
            omega: 0.025,
        }
    }
}

impl LandingThresholds {
    /// Looser gate used for short desk-scale training runs.
    pub fn relaxed() -> Self {
        Self {
            miss: 5.0,
            speed: 0.2,
            omega: 0.05,
        }
    }
}

/// Dynamics used for gravity during an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GravityMode {
    Ellipsoid,
    /// Point mass with a mass drawn independently of the ellipsoid, kg.
    Sphere { mass: Range },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EpisodeConfig {
    pub vehicle: VehicleParams,
    pub initial: InitialRanges,
    pub asteroid: AsteroidRanges,
    pub actuator: ActuatorFailure,
    pub sensor: SensorRanges,
    pub reward: RewardParams,
    pub landing: LandingThresholds,
    pub reference: VelocityReferenceParams,
    pub scales: ObservationScales,
    pub gravity: GravityMode,
    /// Guidance period, s.
    pub guidance_period: f64,
    /// Integration step, s.
    pub dynamics_step: f64,
    /// Duration of the open-loop burn, s.
    pub burn_duration: f64,
    /// Distance of the target point above the site along the surface normal, m.
    pub target_offset: f64,
    /// Episode timeout, s.
    pub t_max: f64,
    /// Rotational-rate constraint on each body-rate component, rad/s.
    pub omega_max: f64,
    /// Episode ends when the adjusted measured range falls to this, m.
    pub terminal_range: f64,
    /// Episode also ends when closing velocity reverses inside this range, m.
    pub reversal_range: f64,
    /// Environmental torque on the vehicle, N·m.
    pub env_torque: Vec3,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            vehicle: VehicleParams::spacecraft(),
            initial: InitialRanges::default(),
            asteroid: AsteroidRanges::default(),
            actuator: ActuatorFailure::default(),
            sensor: SensorRanges::default(),
            reward: RewardParams::default(),
            landing: LandingThresholds::default(),
            reference: VelocityReferenceParams::default(),
            scales: ObservationScales::default(),
            gravity: GravityMode::Ellipsoid,
            guidance_period: 6.0,
            dynamics_step: 2.0,
            burn_duration: 10.0,
            target_offset: 10.0,
            t_max: 6000.0,
            omega_max: 0.10,
            terminal_range: 1.0,
            reversal_range: 5.0,
            env_torque: Vec3::zeros(),
        }
    }
}

impl EpisodeConfig {
    /// Training defaults: point-mass gravity and the landing site as target.
    pub fn training() -> Self {
        Self {
            gravity: GravityMode::Sphere {
                mass: Range::new(1e10, 15e10),
            },
            target_offset: 0.0,
            ..Self::default()
        }
    }

    /// Number of integration steps per guidance period.
    pub fn substeps(&self) -> usize {
        (self.guidance_period / self.dynamics_step).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        self.initial.validate()?;
        self.asteroid.validate()?;
        self.actuator.validate()?;
        self.sensor.validate()?;
        if let GravityMode::Sphere { mass } = &self.gravity {
            mass.validate("gravity.mass")?;
            if mass.min <= 0.0 {
                return Err(Error::Config("gravity.mass must be positive".into()));
            }
        }
        if !(self.dynamics_step > 0.0 && self.guidance_period > 0.0) {
            return Err(Error::Config("time steps must be positive".into()));
        }
        let ratio = self.guidance_period / self.dynamics_step;
        if (ratio - ratio.round()).abs() > 1e-9 || ratio.round() < 1.0 {
            return Err(Error::Config(
                "guidance_period must be an integer multiple of dynamics_step".into(),
            ));
        }
        if !(self.burn_duration >= 0.0) || !(self.t_max > 0.0) || !(self.target_offset >= 0.0) {
            return Err(Error::Config(
                "burn_duration, t_max and target_offset must be non-negative".into(),
            ));
        }
        if !(self.omega_max > 0.0) || !(self.terminal_range >= 0.0) {
            return Err(Error::Config("omega_max and terminal_range must be positive".into()));
        }
        let v = &self.vehicle;
        if !(v.side > 0.0 && v.thrust > 0.0 && v.isp > 0.0 && v.dry_mass >= 0.0) {
            return Err(Error::Config("vehicle parameters must be positive".into()));
        }
        if v.dry_mass >= self.initial.mass.min {
            return Err(Error::Config("dry mass must be below the initial mass range".into()));
        }
        Ok(())
    }
}

use serde::{Deserialize, Serialize};

use super::{
    classify_landing, sample_episode, seeker_error, step_reward, EpisodeConfig, EpisodeSetup,
    LandingMetrics,
};
use crate::asteroid::{asteroid_omega, sphere_gravity, AsteroidAttitude, AsteroidModel, GravityField};
use crate::math::{rk4_step, Mat3, Quaternion, SimRng, Vec3};
use crate::seeker::{measure, ObservationVector, SeekerTracker, SeekerTruth};
use crate::spacecraft::{
    body_force_torque, mass_flow, rotational_dynamics, translational_dynamics, SpacecraftState,
    ThrusterCommand, ThrusterConfig, NUM_THRUSTERS,
};
use crate::{Error, Result};

/// Length of the integrated state: r, v, q, ω, m, asteroid attitude.
pub const STATE_DIM: usize = 18;

/// The open-loop burn fires the translational pair on the +z face, which
/// pushes along body −z toward the target.
pub const BURN_COMMAND: ThrusterCommand = {
    let mut c = [false; NUM_THRUSTERS];
    c[10] = true;
    c[11] = true;
    c
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    RotationRate,
    LockLost,
    Crash,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Landed,
    Violation(ViolationKind),
    Timeout,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Landed => "landed",
            Outcome::Violation(ViolationKind::RotationRate) => "rotation_rate",
            Outcome::Violation(ViolationKind::LockLost) => "lock_lost",
            Outcome::Violation(ViolationKind::Crash) => "crash",
            Outcome::Timeout => "timeout",
        }
    }
}

/// Ground-truth diagnostics attached to each step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepInfo {
    pub t: f64,
    pub outcome: Option<Outcome>,
    pub metrics: LandingMetrics,
    pub fuel_used: f64,
    pub adjusted_range: f64,
    pub v_c: f64,
    pub singular: bool,
    /// Angle between body −z and the asteroid-frame velocity, rad.
    pub theta_bv: f64,
    pub truth_theta_u: f64,
    pub truth_theta_v: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub observation: ObservationVector,
    pub reward: f64,
    pub done: bool,
    pub info: StepInfo,
}

/// Forces and mass properties held constant across one integration step.
#[derive(Debug, Clone)]
pub struct DynamicsInputs<'a> {
    pub asteroid: &'a AsteroidModel,
    pub gravity: &'a GravityField,
    pub force_body: Vec3,
    pub torque_body: Vec3,
    pub env_torque: Vec3,
    pub inertia: Mat3,
    pub inertia_rate: Mat3,
    pub mass_rate: f64,
}

pub fn pack_state(s: &SpacecraftState, asteroid_q: &Quaternion) -> [f64; STATE_DIM] {
    let mut y = [0.0; STATE_DIM];
    y[0..3].copy_from_slice(s.r.as_slice());
    y[3..6].copy_from_slice(s.v.as_slice());
    y[6..10].copy_from_slice(&s.q.to_array());
    y[10..13].copy_from_slice(s.omega.as_slice());
    y[13] = s.mass;
    y[14..18].copy_from_slice(&asteroid_q.to_array());
    y
}

fn vec_at(y: &[f64; STATE_DIM], i: usize) -> Vec3 {
    Vec3::new(y[i], y[i + 1], y[i + 2])
}

fn quat_at(y: &[f64; STATE_DIM], i: usize) -> Quaternion {
    Quaternion::new(y[i], y[i + 1], y[i + 2], y[i + 3])
}

/// Gravity with a point-mass fallback below the surface, where the
/// exterior ellipsoid field is undefined. Only reached just before a crash.
fn gravity_at(r: &Vec3, inputs: &DynamicsInputs) -> Vec3 {
    inputs
        .gravity
        .acceleration(r, inputs.asteroid)
        .or_else(|_| sphere_gravity(r, inputs.asteroid.mass()))
        .unwrap_or_else(|_| Vec3::zeros())
}

/// Time derivative of the packed state.
pub fn state_derivative(t: f64, y: &[f64; STATE_DIM], inputs: &DynamicsInputs) -> [f64; STATE_DIM] {
    let r = vec_at(y, 0);
    let v = vec_at(y, 3);
    let q = quat_at(y, 6);
    let omega = vec_at(y, 10);
    let mass = y[13];
    let q_a = quat_at(y, 14);
    let qn = q.normalize();
    let qan = q_a.normalize();

    let omega_a = asteroid_omega(t, inputs.asteroid);
    let force_a = qan.to_body(&qn.to_reference(&inputs.force_body));
    let g = gravity_at(&r, inputs);
    let v_dot = translational_dynamics(&r, &v, &force_a, mass, &inputs.asteroid.srp, &g, &omega_a);
    let w_dot = rotational_dynamics(
        &omega,
        &inputs.inertia,
        &inputs.inertia_rate,
        &inputs.torque_body,
        &inputs.env_torque,
    )
    .unwrap_or_else(|_| Vec3::repeat(f64::NAN));
    let q_dot = q.derivative(&omega);
    let qa_dot = q_a.derivative(&omega_a);

    let mut d = [0.0; STATE_DIM];
    d[0..3].copy_from_slice(v.as_slice());
    d[3..6].copy_from_slice(v_dot.as_slice());
    d[6..10].copy_from_slice(&q_dot);
    d[10..13].copy_from_slice(w_dot.as_slice());
    d[13] = inputs.mass_rate;
    d[14..18].copy_from_slice(&qa_dot);
    d
}

#[derive(Debug, Clone)]
struct Episode {
    setup: EpisodeSetup,
    state: SpacecraftState,
    asteroid_attitude: AsteroidAttitude,
    initial_mass: f64,
    q0: Quaternion,
    tracker: SeekerTracker,
    last_obs: ObservationVector,
    /// Violation raised during the open-loop burn, reported by the first step.
    pending: Option<ViolationKind>,
    done: bool,
}

/// The landing environment: one episode at a time, driven by thruster
/// commands at the guidance rate.
#[derive(Debug, Clone)]
pub struct LandingEnv {
    cfg: EpisodeConfig,
    rng: SimRng,
    episode: Option<Episode>,
}

impl LandingEnv {
    pub fn new(cfg: EpisodeConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            cfg,
            rng: SimRng::seed_from(0),
            episode: None,
        })
    }

    pub fn config(&self) -> &EpisodeConfig {
        &self.cfg
    }

    /// Draw a new episode from `seed`, run the open-loop burn and return the
    /// first observation.
    pub fn reset(&mut self, seed: u64) -> Result<ObservationVector> {
        let mut rng = SimRng::seed_from(seed);
        let setup = sample_episode(&mut rng, &self.cfg);
        self.reset_with(setup, rng)
    }

    /// Start from an explicit setup; `rng` drives measurement noise.
    pub fn reset_with(&mut self, setup: EpisodeSetup, rng: SimRng) -> Result<ObservationVector> {
        self.rng = rng;
        let state = setup.state.clone();
        let q0 = state.q;
        let tracker = SeekerTracker::new(
            self.cfg.guidance_period,
            self.cfg.target_offset,
            0.0,
            self.cfg.reference,
        );
        let placeholder = ObservationVector {
            theta_u: 0.0,
            theta_v: 0.0,
            theta_u_rate: 0.0,
            theta_v_rate: 0.0,
            v_error: 0.0,
            t_go: 0.0,
            dq: Quaternion::IDENTITY,
            omega: Vec3::zeros(),
        };
        self.episode = Some(Episode {
            asteroid_attitude: setup.asteroid_attitude,
            initial_mass: state.mass,
            state,
            setup,
            q0,
            tracker,
            last_obs: placeholder,
            pending: None,
            done: false,
        });
        self.open_loop_burn()
    }

    fn ep(&self) -> &Episode {
        self.episode.as_ref().expect("reset() must be called first")
    }

    fn ep_mut(&mut self) -> &mut Episode {
        self.episode.as_mut().expect("reset() must be called first")
    }

    pub fn setup(&self) -> &EpisodeSetup {
        &self.ep().setup
    }

    pub fn state(&self) -> &SpacecraftState {
        &self.ep().state
    }

    /// Direct access for tests that inject off-nominal states.
    pub fn state_mut(&mut self) -> &mut SpacecraftState {
        &mut self.ep_mut().state
    }

    pub fn time(&self) -> f64 {
        self.ep().asteroid_attitude.t
    }

    pub fn asteroid_attitude(&self) -> &AsteroidAttitude {
        &self.ep().asteroid_attitude
    }

    pub fn latched_attitude(&self) -> Quaternion {
        self.ep().q0
    }

    pub fn set_latched_attitude(&mut self, q0: Quaternion) {
        self.ep_mut().q0 = q0;
    }

    pub fn thrusters(&self) -> &ThrusterConfig {
        &self.ep().setup.thrusters
    }

    pub fn fuel_used(&self) -> f64 {
        let ep = self.ep();
        ep.initial_mass - ep.state.mass
    }

    pub fn is_done(&self) -> bool {
        self.ep().done
    }

    fn truth(&self) -> SeekerTruth {
        let ep = self.ep();
        let r_tm_a = ep.setup.site - ep.state.r;
        SeekerTruth {
            r_tm: ep.asteroid_attitude.q.to_reference(&r_tm_a),
            q: ep.state.q,
            q0: ep.q0,
            omega: ep.state.omega,
        }
    }

    fn rate_violation(&self) -> bool {
        self.ep().state.omega.amax() > self.cfg.omega_max
    }

    /// Integrate `duration` seconds with `cmd` held, in steps of at most the
    /// dynamics step. Stops early at the first constraint violation.
    fn propagate(&mut self, cmd: &ThrusterCommand, duration: f64) -> Result<Option<ViolationKind>> {
        let dt_max = self.cfg.dynamics_step;
        let mut remaining = duration;
        while remaining > 1e-9 {
            let dt = remaining.min(dt_max);
            self.integrate_step(cmd, dt)?;
            remaining -= dt;
            let ep = self.ep();
            if self.rate_violation() {
                return Ok(Some(ViolationKind::RotationRate));
            }
            if ep.setup.asteroid.contains(&ep.state.r) {
                return Ok(Some(ViolationKind::Crash));
            }
        }
        Ok(None)
    }

    fn integrate_step(&mut self, cmd: &ThrusterCommand, dt: f64) -> Result<()> {
        let cfg = &self.cfg;
        let ep = self.episode.as_mut().expect("reset() must be called first");
        let vehicle = &cfg.vehicle;
        let fueled = ep.state.mass > vehicle.dry_mass;
        let cmd = if fueled { *cmd } else { [false; NUM_THRUSTERS] };

        let burned = ep.initial_mass - ep.state.mass;
        let (com, inertia, inertia_rate) =
            ep.setup
                .fuel
                .update(burned, ep.state.mass, vehicle.side, &ep.state.inertia, dt);
        ep.state.r_com = com;
        ep.state.inertia = inertia;
        ep.state.inertia_rate = inertia_rate;

        let (force_body, torque_body) = body_force_torque(&cmd, &ep.setup.thrusters, &com);
        let inputs = DynamicsInputs {
            asteroid: &ep.setup.asteroid,
            gravity: &ep.setup.gravity,
            force_body,
            torque_body,
            env_torque: cfg.env_torque,
            inertia,
            inertia_rate,
            mass_rate: mass_flow(&cmd, &ep.setup.thrusters, vehicle.isp),
        };
        let t = ep.asteroid_attitude.t;
        let y0 = pack_state(&ep.state, &ep.asteroid_attitude.q);
        let y = rk4_step(|t, y| state_derivative(t, y, &inputs), t, &y0, dt)?;

        ep.state.r = vec_at(&y, 0);
        ep.state.v = vec_at(&y, 3);
        ep.state.q = quat_at(&y, 6).normalize();
        ep.state.omega = vec_at(&y, 10);
        ep.state.mass = y[13].max(vehicle.dry_mass);
        ep.asteroid_attitude = AsteroidAttitude {
            q: quat_at(&y, 14).normalize(),
            t: t + dt,
        };
        if !y.iter().all(|x| x.is_finite()) {
            return Err(Error::Propagation(format!("non-finite state at t = {}", t + dt)));
        }
        Ok(())
    }

    fn open_loop_burn(&mut self) -> Result<ObservationVector> {
        let truth = self.truth();
        let bias = self.ep().setup.bias.clone();
        let before = measure(&truth, &bias, &mut self.rng)
            .map_err(|_| Error::Domain("target outside the field of regard at start".into()))?;
        let t_start = self.time();
        let violation = self.propagate(&BURN_COMMAND, self.cfg.burn_duration)?;
        let elapsed = self.time() - t_start;
        let truth = self.truth();
        let after = measure(&truth, &bias, &mut self.rng);
        let ep = self.ep_mut();
        ep.pending = violation;
        let obs = match after {
            Ok(after) => {
                if elapsed > 0.0 {
                    ep.tracker.v_c = (before.range - after.range) / elapsed;
                }
                ep.tracker.observe(&after).0
            }
            Err(_) => {
                ep.pending.get_or_insert(ViolationKind::LockLost);
                ep.tracker.observe(&before).0
            }
        };
        ep.last_obs = obs.clone();
        Ok(obs)
    }

    fn metrics(&self) -> LandingMetrics {
        let ep = self.ep();
        classify_landing(
            &ep.state.r,
            &ep.state.v,
            &ep.state.omega,
            &ep.setup.target,
            &self.cfg.landing,
        )
    }

    fn theta_bv(&self) -> f64 {
        let ep = self.ep();
        let boresight = ep
            .asteroid_attitude
            .q
            .to_body(&ep.state.q.to_reference(&Vec3::new(0.0, 0.0, -1.0)));
        let v = ep.state.v;
        if v.norm() == 0.0 {
            return 0.0;
        }
        (boresight.dot(&v) / v.norm()).clamp(-1.0, 1.0).acos()
    }

    /// Hold `cmd` for one guidance period and score the result.
    pub fn step(&mut self, cmd: &ThrusterCommand) -> Result<StepResult> {
        if self.ep().done {
            return Err(Error::InvalidInput("step() after episode end".into()));
        }
        let mut violation = self.ep_mut().pending.take();
        if violation.is_none() && self.rate_violation() {
            violation = Some(ViolationKind::RotationRate);
        }
        if violation.is_none() {
            violation = self.propagate(cmd, self.cfg.guidance_period)?;
        }

        let truth = self.truth();
        let (truth_u, truth_v) =
            crate::seeker::seeker_angles(&truth.r_tm, &truth.q0).unwrap_or((0.0, 0.0));
        let bias = self.ep().setup.bias.clone();
        let measured = measure(&truth, &bias, &mut self.rng);
        let t = self.time();

        let ep = self.ep_mut();
        let (obs, vr, adjusted) = match measured {
            Ok(m) => {
                let adjusted = ep.tracker.adjusted_range(&m);
                let (obs, vr) = ep.tracker.observe(&m);
                (obs, Some(vr), adjusted)
            }
            Err(_) => {
                violation.get_or_insert(ViolationKind::LockLost);
                (ep.last_obs.clone(), None, f64::NAN)
            }
        };
        ep.last_obs = obs.clone();
        let v_c = ep.tracker.v_c;

        let outcome = if let Some(kind) = violation {
            Some(Outcome::Violation(kind))
        } else if adjusted <= self.cfg.terminal_range
            || (v_c <= 0.0 && adjusted < self.cfg.reversal_range)
        {
            Some(Outcome::Landed)
        } else if t >= self.cfg.t_max - 1e-9 {
            Some(Outcome::Timeout)
        } else {
            None
        };

        let metrics = self.metrics();
        let good = outcome == Some(Outcome::Landed) && metrics.good;
        let thrust_fraction = cmd.iter().filter(|&&c| c).count() as f64;
        let s_err = seeker_error(obs.theta_u, obs.theta_v);
        let reward = step_reward(
            &self.cfg.reward,
            obs.v_error,
            s_err,
            thrust_fraction,
            good,
            violation.is_some(),
        );
        if !reward.is_finite() {
            return Err(Error::Numeric(format!("non-finite reward at t = {t}")));
        }
        let done = outcome.is_some();
        self.ep_mut().done = done;
        Ok(StepResult {
            observation: obs,
            reward,
            done,
            info: StepInfo {
                t,
                outcome,
                metrics,
                fuel_used: self.fuel_used(),
                adjusted_range: adjusted,
                v_c,
                singular: vr.map(|v| v.singular).unwrap_or(false),
                theta_bv: self.theta_bv(),
                truth_theta_u: truth_u,
                truth_theta_v: truth_v,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::asteroid::Range;
    use crate::env::{ActuatorFailure, GravityMode};
    use crate::seeker::{SensorBias, SensorRanges};
    use crate::spacecraft::{FuelModel, G_REF};

    fn quiet_config() -> EpisodeConfig {
        EpisodeConfig {
            actuator: ActuatorFailure::none(),
            sensor: SensorRanges::ideal(),
            ..EpisodeConfig::default()
        }
    }

    fn free_space_setup(seed: u64) -> EpisodeSetup {
        let mut setup = sample_episode(&mut SimRng::seed_from(seed), &quiet_config());
        setup.gravity = GravityField::Sphere { mass: 0.0 };
        setup.asteroid.spin_rate = 0.0;
        setup.asteroid.srp = Vec3::zeros();
        setup.fuel = FuelModel::fixed(Vec3::zeros());
        setup.state.r_com = Vec3::zeros();
        setup.state.omega = Vec3::zeros();
        setup.bias = SensorBias::none();
        setup
    }

    #[test]
    fn burn_impulse_matches_rocket_equation() {
        let mut setup = free_space_setup(3);
        setup.state.mass = 475.0;
        let v0 = setup.state.v;
        let q = setup.state.q;
        let mut env = LandingEnv::new(quiet_config()).unwrap();
        env.reset_with(setup, SimRng::seed_from(0)).unwrap();
        let s = env.state();
        let burned = 475.0 - s.mass;
        assert!((burned - 10.0 * 2.0 / (225.0 * G_REF)).abs() < 1e-9);
        assert!((burned - 9.07e-3).abs() < 1e-5);
        let dv = s.v - v0;
        let expected = 225.0 * G_REF * (475.0 / s.mass).ln();
        assert!((dv.norm() - expected).abs() < 1e-9 * expected);
        assert!((dv.norm() - 0.042).abs() < 5e-4);
        let dir = q.to_reference(&Vec3::new(0.0, 0.0, -1.0));
        assert!((dv.normalize() - dir).norm() < 1e-9);
        assert_eq!(s.omega, Vec3::zeros());
    }

    #[test]
    fn burn_yields_positive_closing_velocity() {
        let mut env = LandingEnv::new(EpisodeConfig::default()).unwrap();
        for seed in 0..10_000 {
            env.reset(seed).unwrap();
            assert!(env.ep().tracker.v_c > 0.0, "seed {seed}");
        }
    }

    #[test]
    fn replay_is_bit_identical() {
        let cfg = EpisodeConfig::default();
        let run = |seed| {
            let mut env = LandingEnv::new(cfg.clone()).unwrap();
            env.reset(seed).unwrap();
            let mut rewards = Vec::new();
            let mut rng = SimRng::seed_from(seed + 1);
            for _ in 0..40 {
                let cmd: ThrusterCommand = std::array::from_fn(|_| rng.chance(0.1));
                let s = env.step(&cmd).unwrap();
                rewards.push(s.reward.to_bits());
                if s.done {
                    break;
                }
            }
            (rewards, env.state().clone())
        };
        assert_eq!(run(5), run(5));
    }

    #[test]
    fn injected_rate_violation_terminates_with_penalty() {
        let cfg = EpisodeConfig::default();
        let mut env = LandingEnv::new(cfg.clone()).unwrap();
        env.reset(9).unwrap();
        env.state_mut().omega = Vec3::new(0.0, -0.11, 0.0);
        let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
        assert!(s.done);
        assert_eq!(s.info.outcome, Some(Outcome::Violation(ViolationKind::RotationRate)));
        assert!(s.reward <= cfg.reward.kappa + cfg.reward.eta);
        assert!(env.step(&[false; NUM_THRUSTERS]).is_err());
    }

    #[test]
    fn violation_during_burn_ends_first_step() {
        let mut setup = free_space_setup(4);
        setup.state.omega = Vec3::new(0.12, 0.0, 0.0);
        let cfg = quiet_config();
        let mut env = LandingEnv::new(cfg.clone()).unwrap();
        env.reset_with(setup, SimRng::seed_from(0)).unwrap();
        assert!(env.time() < cfg.burn_duration);
        let t = env.time();
        let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
        assert!(s.done);
        assert_eq!(s.info.outcome, Some(Outcome::Violation(ViolationKind::RotationRate)));
        assert!(s.reward <= cfg.reward.kappa + cfg.reward.eta);
        assert_eq!(env.time(), t);
    }

    #[test]
    fn injected_lock_loss_terminates_with_penalty() {
        let cfg = EpisodeConfig::default();
        let mut env = LandingEnv::new(cfg.clone()).unwrap();
        env.reset(10).unwrap();
        let tilt = Quaternion::from_axis_angle(&Vec3::x(), 60f64.to_radians());
        let q0 = env.latched_attitude() * tilt;
        env.set_latched_attitude(q0);
        let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
        assert!(s.done);
        assert_eq!(s.info.outcome, Some(Outcome::Violation(ViolationKind::LockLost)));
        assert!(s.reward < -40.0);
    }

    #[test]
    fn coasting_reward_uses_observation() {
        let cfg = quiet_config();
        let mut env = LandingEnv::new(cfg.clone()).unwrap();
        env.reset(11).unwrap();
        let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
        assert!(!s.done);
        let o = &s.observation;
        let want = 0.01 - 0.5 * o.v_error.abs() - 0.5 * o.theta_u.hypot(o.theta_v);
        assert!((s.reward - want).abs() < 1e-12);
        assert!((s.info.t - (cfg.burn_duration + cfg.guidance_period)).abs() < 1e-9);
    }

    #[test]
    fn timeout_ends_episode() {
        let cfg = EpisodeConfig {
            t_max: 40.0,
            ..quiet_config()
        };
        let mut env = LandingEnv::new(cfg).unwrap();
        env.reset(12).unwrap();
        let mut last = None;
        for _ in 0..10 {
            let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
            if s.done {
                last = s.info.outcome;
                break;
            }
        }
        assert_eq!(last, Some(Outcome::Timeout));
    }

    #[test]
    fn quaternion_norm_preserved() {
        let mut env = LandingEnv::new(EpisodeConfig {
            initial: crate::env::InitialRanges {
                omega: Range::new(-0.02, 0.02),
                ..Default::default()
            },
            ..EpisodeConfig::default()
        })
        .unwrap();
        env.reset(13).unwrap();
        for _ in 0..100 {
            let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
            assert!((env.state().q.norm() - 1.0).abs() < 1e-12);
            if s.done {
                break;
            }
        }
    }

    #[test]
    fn training_mode_uses_point_mass() {
        let cfg = EpisodeConfig::training();
        assert!(matches!(cfg.gravity, GravityMode::Sphere { .. }));
        let mut env = LandingEnv::new(cfg).unwrap();
        env.reset(14).unwrap();
        match env.setup().gravity {
            GravityField::Sphere { mass } => assert!((1e10..=15e10).contains(&mass)),
            _ => panic!("expected point-mass gravity"),
        }
        assert_eq!(env.setup().target, env.setup().site);
    }
}

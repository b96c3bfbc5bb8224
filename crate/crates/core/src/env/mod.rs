//! Episode orchestration for the landing problem.
//!
//! An episode samples an asteroid, a landing site and a spacecraft state,
//! fires a short open-loop burn to establish a positive closing velocity and
//! then advances one guidance period per [`LandingEnv::step`]. Each period
//! holds the thruster command constant over several RK4 steps of the coupled
//! spacecraft and asteroid-attitude state.

mod config;
mod episode;
mod initial;
mod reward;
mod rl;
mod trajectory;

pub use config::{
    ActuatorFailure, EpisodeConfig, GravityMode, InitialRanges, LandingThresholds, RewardParams,
};
pub use episode::{
    pack_state, state_derivative, DynamicsInputs, LandingEnv, Outcome, StepInfo, StepResult,
    ViolationKind, BURN_COMMAND, STATE_DIM,
};
pub use initial::{boresight_attitude, sample_episode, sample_initial_conditions, EpisodeSetup};
pub use reward::{classify_landing, discretize_action, seeker_error, step_reward, LandingMetrics};
pub use trajectory::{Trajectory, TrajectoryRecord};

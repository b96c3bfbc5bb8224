//! Asteroid close-proximity landing laboratory.
//!
//! A randomized 6-DOF simulator of a thruster-controlled spacecraft approaching
//! a tumbling ellipsoidal asteroid, a stabilized-seeker observation model, a
//! recurrent (GRU) policy/value network pair with hand-written backpropagation
//! through time, a PPO trainer with a KL-adaptive clip parameter, and a Monte
//! Carlo evaluation harness.
//!
//! Module map:
//!
//! - [`math`]: vectors, scalar-first quaternions, RK4, seeded RNG streams.
//! - [`asteroid`]: ellipsoid gravity (Carlson integrals), tumbling spin, SRP.
//! - [`spacecraft`]: thruster geometry, force/torque, mass and inertia evolution.
//! - [`seeker`]: seeker angles, sensor distortion, observation assembly.
//! - [`env`]: episode setup, open-loop burn, guidance steps, reward, landing checks.
//! - [`neural`]: tanh/GRU networks, Gaussian policy head, BPTT, gradient checks.
//! - [`ppo`]: rollouts, advantages, clipped surrogate, adaptive clipping, Adam.
//! - [`harness`]: configuration, training/evaluation/simulation/validation runs.

pub mod asteroid;
pub mod env;
pub mod error;
pub mod harness;
pub mod math;
pub mod neural;
pub mod ppo;
pub mod seeker;
pub mod spacecraft;

pub use error::{Error, Result};

//! Randomized asteroid environment.
//!
//! The asteroid is a uniform-density ellipsoid with semi-axes `a ≥ b = c`,
//! tumbling with the nutating angular velocity of an axisymmetric body. The
//! spacecraft state lives in the asteroid-fixed (rotating) frame; the inertial
//! attitude of that frame is carried by [`AsteroidAttitude`].

mod carlson;
mod gravity;
mod model;

pub use carlson::{carlson_rd, carlson_rf};
pub use gravity::{
    confocal_parameter, ellipsoid_gravity, ellipsoid_potential, sphere_gravity, GravityField,
};
pub use model::{
    asteroid_inertia, asteroid_omega, propagate_asteroid_attitude, sample_asteroid,
    AsteroidAttitude, AsteroidModel, AsteroidRanges, Range,
};

/// Gravitational constant, m³/(kg·s²).
pub const GRAVITATIONAL_CONSTANT: f64 = 6.674e-11;

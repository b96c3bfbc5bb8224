//! Stabilized-seeker measurement model.
//!
//! The seeker platform is latched to the spacecraft attitude `q0` at the
//! start of the maneuver and then held inertially fixed, so the seeker frame
//! is `[BN](q0)` applied to inertial vectors. The boresight is the platform's
//! −z axis; the seeker angles are the arcsines of the line-of-sight
//! projections onto the platform x and y axes.

mod measure;
mod observation;

pub use measure::{
    in_field_of_regard, measure, seeker_angles, LockLost, Measurement, SeekerTruth, SensorBias,
    SensorRanges, FIELD_OF_REGARD_HALF_ANGLE,
};
pub use observation::{
    velocity_reference, ObservationScales, ObservationVector, SeekerTracker, VelocityReference,
    VelocityReferenceParams, OBS_DIM, T_GO_MAX,
};

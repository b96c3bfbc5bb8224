use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::asteroid::Range;
use crate::math::{Quaternion, SimRng, Vec3};
use crate::{Error, Result};

/// Half of the 90° field of regard, rad.
pub const FIELD_OF_REGARD_HALF_ANGLE: f64 = FRAC_PI_4;

/// Seeker angles `(θ_u, θ_v)` of the target at inertial relative position
/// `r_tm` as seen from a platform latched at attitude `q0`.
pub fn seeker_angles(r_tm: &Vec3, q0: &Quaternion) -> Result<(f64, f64)> {
    let range = r_tm.norm();
    if !(range > 0.0) {
        return Err(Error::Domain("zero range to target".into()));
    }
    let los = q0.to_body(r_tm) / range;
    Ok((los.x.clamp(-1.0, 1.0).asin(), los.y.clamp(-1.0, 1.0).asin()))
}

/// True when both angles are within ±45° and the target lies in front of the
/// platform (negative z component of the seeker-frame line of sight).
pub fn in_field_of_regard(r_tm: &Vec3, q0: &Quaternion) -> bool {
    match seeker_angles(r_tm, q0) {
        Ok((u, v)) => {
            u.abs() <= FIELD_OF_REGARD_HALF_ANGLE
                && v.abs() <= FIELD_OF_REGARD_HALF_ANGLE
                && q0.to_body(r_tm).z < 0.0
        }
        Err(_) => false,
    }
}

/// Per-episode sensor distortion, held constant within the episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SensorBias {
    /// Range reading is the truth times `1 + range`.
    pub range: f64,
    /// Seeker angles are the truth times `1 + angle`.
    pub angle: f64,
    /// Elementwise multiplier `1 + attitude[i]` on the attitude change.
    pub attitude: [f64; 4],
    /// Elementwise multiplier `1 + rate[i]` on the body rates.
    pub rate: Vec3,
    /// Standard deviation of additive angle noise, rad.
    pub angle_noise_sd: f64,
}

impl SensorBias {
    pub fn none() -> Self {
        Self {
            range: 0.0,
            angle: 0.0,
            attitude: [0.0; 4],
            rate: Vec3::zeros(),
            angle_noise_sd: 0.0,
        }
    }

    pub fn sample(rng: &mut SimRng, ranges: &SensorRanges) -> Self {
        Self {
            range: ranges.range_bias.sample(rng),
            angle: ranges.angle_bias.sample(rng),
            attitude: [
                ranges.attitude_bias.sample(rng),
                ranges.attitude_bias.sample(rng),
                ranges.attitude_bias.sample(rng),
                ranges.attitude_bias.sample(rng),
            ],
            rate: Vec3::new(
                ranges.rate_bias.sample(rng),
                ranges.rate_bias.sample(rng),
                ranges.rate_bias.sample(rng),
            ),
            angle_noise_sd: ranges.angle_noise_mrad * 1e-3,
        }
    }
}

/// Sampling ranges for [`SensorBias`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SensorRanges {
    pub range_bias: Range,
    pub angle_bias: Range,
    pub attitude_bias: Range,
    pub rate_bias: Range,
    pub angle_noise_mrad: f64,
}

impl Default for SensorRanges {
    fn default() -> Self {
        Self {
            range_bias: Range::new(-0.05, 0.05),
            angle_bias: Range::new(-0.05, 0.05),
            attitude_bias: Range::new(-0.05, 0.05),
            rate_bias: Range::new(-0.05, 0.05),
            angle_noise_mrad: 1.0,
        }
    }
}

impl SensorRanges {
    /// No bias and no noise.
    pub fn ideal() -> Self {
        Self {
            range_bias: Range::fixed(0.0),
            angle_bias: Range::fixed(0.0),
            attitude_bias: Range::fixed(0.0),
            rate_bias: Range::fixed(0.0),
            angle_noise_mrad: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.range_bias.validate("sensor.range_bias")?;
        self.angle_bias.validate("sensor.angle_bias")?;
        self.attitude_bias.validate("sensor.attitude_bias")?;
        self.rate_bias.validate("sensor.rate_bias")?;
        if !(self.angle_noise_mrad >= 0.0) {
            return Err(Error::Config("sensor.angle_noise_mrad must be non-negative".into()));
        }
        Ok(())
    }
}

/// Ground-truth geometry needed to synthesize one seeker reading.
#[derive(Debug, Clone, PartialEq)]
pub struct SeekerTruth {
    /// Spacecraft-to-landing-site vector, inertial frame.
    pub r_tm: Vec3,
    /// Current attitude `[BN]`.
    pub q: Quaternion,
    /// Attitude latched at the start of the maneuver.
    pub q0: Quaternion,
    /// Body angular velocity.
    pub omega: Vec3,
}

/// Distorted sensor outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    /// Measured range to the landing site (not offset-adjusted), m.
    pub range: f64,
    pub theta_u: f64,
    pub theta_v: f64,
    /// Measured attitude change since the latch, renormalized.
    pub dq: Quaternion,
    pub omega: Vec3,
}

/// The target left the seeker's field of regard.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LockLost {
    pub theta_u: f64,
    pub theta_v: f64,
}

/// Apply per-episode bias and angle noise to the ground truth.
pub fn measure(
    truth: &SeekerTruth,
    bias: &SensorBias,
    rng: &mut SimRng,
) -> std::result::Result<Measurement, LockLost> {
    let (u, v) = seeker_angles(&truth.r_tm, &truth.q0).map_err(|_| LockLost {
        theta_u: 0.0,
        theta_v: 0.0,
    })?;
    if !in_field_of_regard(&truth.r_tm, &truth.q0) {
        return Err(LockLost {
            theta_u: u,
            theta_v: v,
        });
    }
    let noise_u = rng.normal(0.0, bias.angle_noise_sd);
    let noise_v = rng.normal(0.0, bias.angle_noise_sd);
    let dq = (truth.q * truth.q0.inverse()).to_array();
    let dq = Quaternion::from_array([
        dq[0] * (1.0 + bias.attitude[0]),
        dq[1] * (1.0 + bias.attitude[1]),
        dq[2] * (1.0 + bias.attitude[2]),
        dq[3] * (1.0 + bias.attitude[3]),
    ])
    .normalize();
    Ok(Measurement {
        range: truth.r_tm.norm() * (1.0 + bias.range),
        theta_u: u * (1.0 + bias.angle) + noise_u,
        theta_v: v * (1.0 + bias.angle) + noise_v,
        dq,
        omega: truth.omega.component_mul(&(Vec3::repeat(1.0) + bias.rate)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force oracle: build the seeker axes explicitly as inertial
    /// vectors (rows of the DCM) and project.
    fn projection_oracle(r: &Vec3, q0: &Quaternion) -> (f64, f64) {
        let c = q0.dcm();
        let x_axis = Vec3::new(c[(0, 0)], c[(0, 1)], c[(0, 2)]);
        let y_axis = Vec3::new(c[(1, 0)], c[(1, 1)], c[(1, 2)]);
        let lhat = r / r.norm();
        (lhat.dot(&x_axis).asin(), lhat.dot(&y_axis).asin())
    }

    #[test]
    fn boresight_target_has_zero_angles() {
        let (u, v) = seeker_angles(&Vec3::new(0.0, 0.0, -850.0), &Quaternion::IDENTITY).unwrap();
        assert_eq!((u, v), (0.0, 0.0));
    }

    #[test]
    fn target_along_x_is_right_angle() {
        let (u, v) = seeker_angles(&Vec3::new(3.0, 0.0, 0.0), &Quaternion::IDENTITY).unwrap();
        assert!((u - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn zero_range_is_domain_error() {
        assert!(seeker_angles(&Vec3::zeros(), &Quaternion::IDENTITY).is_err());
    }

    #[test]
    fn matches_projection_oracle() {
        let mut rng = SimRng::seed_from(31);
        for _ in 0..1000 {
            let q0 = Quaternion::new(
                rng.standard_normal(),
                rng.standard_normal(),
                rng.standard_normal(),
                rng.standard_normal(),
            )
            .normalize();
            let r = rng.unit_vector() * rng.uniform(1.0, 1000.0);
            let (u, v) = seeker_angles(&r, &q0).unwrap();
            let (ou, ov) = projection_oracle(&r, &q0);
            assert!((u - ou).abs() < 1e-12 && (v - ov).abs() < 1e-12);
        }
    }

    #[test]
    fn field_of_regard_limits() {
        let q0 = Quaternion::IDENTITY;
        let inside = Vec3::new(0.5, -0.4, -1.0);
        assert!(in_field_of_regard(&inside, &q0));
        let wide = Vec3::new(1.2, 0.0, -1.0);
        assert!(!in_field_of_regard(&wide, &q0));
        let behind = Vec3::new(0.1, 0.1, 1.0);
        assert!(!in_field_of_regard(&behind, &q0));
    }

    fn truth() -> SeekerTruth {
        SeekerTruth {
            r_tm: Vec3::new(30.0, -20.0, -1000.0),
            q: Quaternion::from_axis_angle(&Vec3::new(1.0, 2.0, 0.5), 0.2),
            q0: Quaternion::IDENTITY,
            omega: Vec3::new(0.01, -0.02, 0.005),
        }
    }

    #[test]
    fn unbiased_measurement_is_truth() {
        let t = truth();
        let m = measure(&t, &SensorBias::none(), &mut SimRng::seed_from(0)).unwrap();
        let (u, v) = seeker_angles(&t.r_tm, &t.q0).unwrap();
        assert_eq!((m.theta_u, m.theta_v), (u, v));
        assert_eq!(m.range, t.r_tm.norm());
        assert_eq!(m.omega, t.omega);
        assert!(m.dq.dot(&t.q).abs() > 1.0 - 1e-15);
    }

    #[test]
    fn range_bias_scales_range() {
        let t = SeekerTruth {
            r_tm: Vec3::new(0.0, 0.0, -1000.0),
            ..truth()
        };
        let bias = SensorBias {
            range: 0.05,
            ..SensorBias::none()
        };
        let m = measure(&t, &bias, &mut SimRng::seed_from(0)).unwrap();
        assert!((m.range - 1050.0).abs() < 1e-9);
    }

    #[test]
    fn angle_noise_standard_deviation() {
        let t = truth();
        let bias = SensorBias {
            angle_noise_sd: 1e-3,
            ..SensorBias::none()
        };
        let (u, _) = seeker_angles(&t.r_tm, &t.q0).unwrap();
        let mut rng = SimRng::seed_from(123);
        let n = 100_000;
        let samples: Vec<f64> = (0..n)
            .map(|_| measure(&t, &bias, &mut rng).unwrap().theta_u - u)
            .collect();
        let mean = samples.iter().sum::<f64>() / n as f64;
        let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var.sqrt() / 1e-3 - 1.0).abs() < 0.02);
    }

    #[test]
    fn lock_lost_outside_field_of_regard() {
        let t = SeekerTruth {
            r_tm: Vec3::new(900.0, 0.0, -100.0),
            ..truth()
        };
        let err = measure(&t, &SensorBias::none(), &mut SimRng::seed_from(0)).unwrap_err();
        assert!(err.theta_u > FIELD_OF_REGARD_HALF_ANGLE);
    }

    #[test]
    fn angles_ignore_current_attitude() {
        let mut t = truth();
        let (u0, v0) = {
            let m = measure(&t, &SensorBias::none(), &mut SimRng::seed_from(0)).unwrap();
            (m.theta_u, m.theta_v)
        };
        t.q = Quaternion::from_axis_angle(&Vec3::new(-0.3, 0.1, 0.9), 1.1);
        let m = measure(&t, &SensorBias::none(), &mut SimRng::seed_from(0)).unwrap();
        assert_eq!((m.theta_u, m.theta_v), (u0, v0));
    }
}

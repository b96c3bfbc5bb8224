use std::ops::Mul;

use serde::{Deserialize, Serialize};

use super::{Mat3, Vec3};
use crate::{Error, Result};

/// Tolerance on `|‖q‖ − 1|` accepted by checked conversions.
pub const UNIT_TOLERANCE: f64 = 1e-6;

/// Scalar-first unit quaternion `(q0, q1, q2, q3)`.
///
/// Composition uses the Hamilton product. With this convention
/// `[BN](p ⊗ q) = [BN](q) · [BN](p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Default for Quaternion {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        q0: 1.0,
        q1: 0.0,
        q2: 0.0,
        q3: 0.0,
    };

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Self { q0, q1, q2, q3 }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }

    /// Rotation of `angle` radians about `axis` (need not be normalized).
    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        let n = axis.normalize();
        let (s, c) = (0.5 * angle).sin_cos();
        Self::new(c, s * n.x, s * n.y, s * n.z)
    }

    pub fn norm(&self) -> f64 {
        (self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3).sqrt()
    }

    pub fn normalize(&self) -> Self {
        let n = self.norm();
        Self::new(self.q0 / n, self.q1 / n, self.q2 / n, self.q3 / n)
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    /// Inverse of a unit quaternion.
    pub fn inverse(&self) -> Self {
        let n2 = self.norm().powi(2);
        let c = self.conjugate();
        Self::new(c.q0 / n2, c.q1 / n2, c.q2 / n2, c.q3 / n2)
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.q0 * other.q0 + self.q1 * other.q1 + self.q2 * other.q2 + self.q3 * other.q3
    }

    fn check_unit(&self) -> Result<()> {
        let n = self.norm();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::InvalidInput(format!(
                "quaternion norm {n} is not within {UNIT_TOLERANCE} of one"
            )));
        }
        Ok(())
    }

    /// Direction cosine matrix `[BN]` mapping reference-frame components to
    /// body-frame components.
    pub fn to_dcm(&self) -> Result<Mat3> {
        self.check_unit()?;
        Ok(self.dcm())
    }

    /// [`Self::to_dcm`] without the unit-norm check.
    pub fn dcm(&self) -> Mat3 {
        let Self { q0, q1, q2, q3 } = *self;
        Mat3::new(
            q0 * q0 + q1 * q1 - q2 * q2 - q3 * q3,
            2.0 * (q1 * q2 + q0 * q3),
            2.0 * (q1 * q3 - q0 * q2),
            2.0 * (q1 * q2 - q0 * q3),
            q0 * q0 - q1 * q1 + q2 * q2 - q3 * q3,
            2.0 * (q2 * q3 + q0 * q1),
            2.0 * (q1 * q3 + q0 * q2),
            2.0 * (q2 * q3 - q0 * q1),
            q0 * q0 - q1 * q1 - q2 * q2 + q3 * q3,
        )
    }

    /// Quaternion whose `[BN]` equals `dcm` (Shepperd's method). The result has
    /// a non-negative scalar part.
    pub fn from_dcm(c: &Mat3) -> Self {
        let tr = c.trace();
        let b = [
            0.25 * (1.0 + tr),
            0.25 * (1.0 + 2.0 * c[(0, 0)] - tr),
            0.25 * (1.0 + 2.0 * c[(1, 1)] - tr),
            0.25 * (1.0 + 2.0 * c[(2, 2)] - tr),
        ];
        let (i, &max) = b
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.total_cmp(y.1))
            .expect("four entries");
        let s = max.sqrt();
        let q = match i {
            0 => [
                s,
                (c[(1, 2)] - c[(2, 1)]) / (4.0 * s),
                (c[(2, 0)] - c[(0, 2)]) / (4.0 * s),
                (c[(0, 1)] - c[(1, 0)]) / (4.0 * s),
            ],
            1 => [
                (c[(1, 2)] - c[(2, 1)]) / (4.0 * s),
                s,
                (c[(0, 1)] + c[(1, 0)]) / (4.0 * s),
                (c[(2, 0)] + c[(0, 2)]) / (4.0 * s),
            ],
            2 => [
                (c[(2, 0)] - c[(0, 2)]) / (4.0 * s),
                (c[(0, 1)] + c[(1, 0)]) / (4.0 * s),
                s,
                (c[(1, 2)] + c[(2, 1)]) / (4.0 * s),
            ],
            _ => [
                (c[(0, 1)] - c[(1, 0)]) / (4.0 * s),
                (c[(2, 0)] + c[(0, 2)]) / (4.0 * s),
                (c[(1, 2)] + c[(2, 1)]) / (4.0 * s),
                s,
            ],
        };
        let q = Self::from_array(q).normalize();
        if q.q0 < 0.0 {
            Self::new(-q.q0, -q.q1, -q.q2, -q.q3)
        } else {
            q
        }
    }

    /// Kinematic rate `q̇ = ½ B(q) [0, ω]` for body angular velocity `ω`.
    pub fn derivative(&self, omega: &Vec3) -> [f64; 4] {
        let Self { q0, q1, q2, q3 } = *self;
        let (w0, w1, w2) = (omega.x, omega.y, omega.z);
        [
            0.5 * (-q1 * w0 - q2 * w1 - q3 * w2),
            0.5 * (q0 * w0 - q3 * w1 + q2 * w2),
            0.5 * (q3 * w0 + q0 * w1 - q1 * w2),
            0.5 * (-q2 * w0 + q1 * w1 + q0 * w2),
        ]
    }

    /// Reference-frame vector expressed in the body frame.
    pub fn to_body(&self, v: &Vec3) -> Vec3 {
        self.dcm() * v
    }

    /// Body-frame vector expressed in the reference frame.
    pub fn to_reference(&self, v: &Vec3) -> Vec3 {
        self.dcm().transpose() * v
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, r: Quaternion) -> Quaternion {
        let l = self;
        Quaternion::new(
            l.q0 * r.q0 - l.q1 * r.q1 - l.q2 * r.q2 - l.q3 * r.q3,
            l.q0 * r.q1 + l.q1 * r.q0 + l.q2 * r.q3 - l.q3 * r.q2,
            l.q0 * r.q2 - l.q1 * r.q3 + l.q2 * r.q0 + l.q3 * r.q1,
            l.q0 * r.q3 + l.q1 * r.q2 - l.q2 * r.q1 + l.q3 * r.q0,
        )
    }
}

/// Quaternion rate as the literal 4×4 matrix product of the kinematic
/// equation. Used only as an independent check of [`Quaternion::derivative`].
#[cfg(test)]
fn derivative_by_matrix(q: &Quaternion, w: &Vec3) -> [f64; 4] {
    let m = [
        [q.q0, -q.q1, -q.q2, -q.q3],
        [q.q1, q.q0, -q.q3, q.q2],
        [q.q2, q.q3, q.q0, -q.q1],
        [q.q3, -q.q2, q.q1, q.q0],
    ];
    let x = [0.0, w.x, w.y, w.z];
    let mut out = [0.0; 4];
    for i in 0..4 {
        out[i] = 0.5 * (0..4).map(|j| m[i][j] * x[j]).sum::<f64>();
    }
    out
}


#[cfg(test)]
mod props {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn unit() -> impl Strategy<Value = Quaternion> {
        prop::array::uniform4(-1.0f64..1.0)
            .prop_filter("nonzero", |a| a.iter().map(|x| x * x).sum::<f64>() > 1e-2)
            .prop_map(|a| Quaternion::from_array(a).normalize())
    }

    fn vec3() -> impl Strategy<Value = Vec3> {
        prop::array::uniform3(-100.0f64..100.0).prop_map(Vec3::from)
    }

    proptest! {
        #[test]
        fn rotation_round_trip_preserves_vector(q in unit(), v in vec3()) {
            let b = q.to_body(&v);
            assert_relative_eq!(b.norm(), v.norm(), epsilon = 1e-10);
            let back = q.to_reference(&b);
            assert_relative_eq!(back, v, epsilon = 1e-10);
        }

        #[test]
        fn dcm_round_trip_up_to_sign(q in unit()) {
            let p = Quaternion::from_dcm(&q.dcm());
            assert_relative_eq!(p.dot(&q).abs(), 1.0, epsilon = 1e-10);
        }

        #[test]
        fn product_composes_dcms(p in unit(), q in unit()) {
            let pq = (p * q).dcm();
            assert_relative_eq!(pq, q.dcm() * p.dcm(), epsilon = 1e-10);
        }
    }
}

//! Shared numeric primitives.
//!
//! Frames are right-handed. Quaternions are scalar-first and describe the
//! attitude of a body frame B relative to a reference frame N; the matrix
//! returned by [`Quaternion::to_dcm`] is `[BN]`, which maps N-frame
//! components into B-frame components (passive convention).

mod quaternion;
mod rk4;
mod rng;

pub use quaternion::Quaternion;
pub use rk4::rk4_step;
pub use rng::{RngState, SimRng};

pub type Vec3 = nalgebra::Vector3<f64>;
pub type Mat3 = nalgebra::Matrix3<f64>;

/// Cross-product matrix: `skew(a) * b == a.cross(&b)`.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

/// Any unit vector perpendicular to `v` (which must be non-zero).
pub fn orthogonal_unit(v: &Vec3) -> Vec3 {
    let n = v.normalize();
    let helper = if n.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    n.cross(&helper).normalize()
}

/// Direction at polar angle `theta` and azimuth `phi` about `axis`.
///
/// The axis is rotated onto +z, the direction `(sinθ cosφ, sinθ sinφ, cosθ)`
/// is formed there and the result is rotated back.
pub fn cone_direction(axis: &Vec3, theta: f64, phi: f64) -> Vec3 {
    let z = axis.normalize();
    let x = orthogonal_unit(&z);
    let y = z.cross(&x);
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    x * (st * cp) + y * (st * sp) + z * ct
}

use serde::{Deserialize, Serialize};

use super::{carlson_rd, carlson_rf, AsteroidModel, GRAVITATIONAL_CONSTANT};
use crate::math::Vec3;
use crate::{Error, Result};

const KAPPA_REL_TOL: f64 = 1e-12;
const KAPPA_MAX_ITER: usize = 200;

/// Which field the dynamics use. Training may swap the ellipsoid for a point
/// mass with an independently drawn mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GravityField {
    Ellipsoid,
    Sphere { mass: f64 },
}

impl GravityField {
    pub fn acceleration(&self, r: &Vec3, model: &AsteroidModel) -> Result<Vec3> {
        match *self {
            GravityField::Ellipsoid => ellipsoid_gravity(r, model),
            GravityField::Sphere { mass } => sphere_gravity(r, mass),
        }
    }
}

/// Point-mass attraction `−GM r / ‖r‖³`.
pub fn sphere_gravity(r: &Vec3, mass: f64) -> Result<Vec3> {
    let d = r.norm();
    if !(d > 0.0) {
        return Err(Error::Domain("point-mass gravity at zero range".into()));
    }
    Ok(-GRAVITATIONAL_CONSTANT * mass / (d * d * d) * r)
}

/// Largest root κ of `x²/(a²+κ) + y²/(b²+κ) + z²/(c²+κ) = 1` for a point
/// outside the ellipsoid (the confocal ellipsoid through `r`).
pub fn confocal_parameter(r: &Vec3, a: f64, b: f64, c: f64) -> Result<f64> {
    let sq = [a * a, b * b, c * c];
    let x2 = [r.x * r.x, r.y * r.y, r.z * r.z];
    let level = x2[0] / sq[0] + x2[1] / sq[1] + x2[2] / sq[2];
    if !(level > 1.0) {
        return Err(Error::Domain(format!(
            "point ({}, {}, {}) is not outside the ellipsoid",
            r.x, r.y, r.z
        )));
    }
    let f = |k: f64| (0..3).map(|i| x2[i] / (sq[i] + k)).sum::<f64>() - 1.0;
    let df = |k: f64| -(0..3).map(|i| x2[i] / (sq[i] + k).powi(2)).sum::<f64>();

    // f decreases monotonically; f(r² − a_max²) ≥ 0 and f(r² − a_min²) ≤ 0.
    let r2 = x2.iter().sum::<f64>();
    let max_sq = sq.iter().cloned().fold(f64::MIN, f64::max);
    let min_sq = sq.iter().cloned().fold(f64::MAX, f64::min);
    let mut lo = (r2 - max_sq).max(0.0);
    let mut hi = r2 - min_sq;
    if hi <= lo {
        return Ok(lo);
    }
    // f is convex, so Newton started from the left end approaches the root
    // monotonically; bisection guards against round-off excursions.
    let mut k = lo;
    for _ in 0..KAPPA_MAX_ITER {
        let fk = f(k);
        if fk == 0.0 {
            return Ok(k);
        }
        if fk > 0.0 {
            lo = k;
        } else {
            hi = k;
        }
        let mut next = k - fk / df(k);
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - k).abs() <= KAPPA_REL_TOL * next.abs().max(min_sq) {
            return Ok(next);
        }
        k = next;
    }
    Err(Error::Numeric("confocal parameter solve did not converge".into()))
}

/// Exterior attraction of a uniform triaxial ellipsoid, pointing toward the
/// body.
///
/// `g_i = −G M x_i R_D(·, ·, a_i² + κ)` where the first two arguments are the
/// other two shifted squared semi-axes.
pub fn ellipsoid_gravity(r: &Vec3, model: &AsteroidModel) -> Result<Vec3> {
    let (a, b, c) = (model.a, model.b, model.c);
    let k = confocal_parameter(r, a, b, c)?;
    let (sa, sb, sc) = (a * a + k, b * b + k, c * c + k);
    let gm = GRAVITATIONAL_CONSTANT * model.mass();
    Ok(-gm
        * Vec3::new(
            r.x * carlson_rd(sb, sc, sa)?,
            r.y * carlson_rd(sa, sc, sb)?,
            r.z * carlson_rd(sa, sb, sc)?,
        ))
}

/// Exterior gravitational potential (positive, `U → GM/r` far away) whose
/// gradient is [`ellipsoid_gravity`].
pub fn ellipsoid_potential(r: &Vec3, model: &AsteroidModel) -> Result<f64> {
    let (a, b, c) = (model.a, model.b, model.c);
    let k = confocal_parameter(r, a, b, c)?;
    let (sa, sb, sc) = (a * a + k, b * b + k, c * c + k);
    let gm = GRAVITATIONAL_CONSTANT * model.mass();
    let quad = r.x * r.x * carlson_rd(sb, sc, sa)?
        + r.y * r.y * carlson_rd(sa, sc, sb)?
        + r.z * r.z * carlson_rd(sa, sb, sc)?;
    Ok(1.5 * gm * carlson_rf(sa, sb, sc)? - 0.5 * gm * quad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::SimRng;

    fn model(a: f64, b: f64, c: f64, density: f64) -> AsteroidModel {
        AsteroidModel {
            a,
            b,
            c,
            density,
            ..AsteroidModel::reference()
        }
    }

    #[test]
    fn sphere_gravity_direct_value() {
        let g = sphere_gravity(&Vec3::new(1000.0, 0.0, 0.0), 1e10).unwrap();
        assert!((g.x + 6.674e-7).abs() < 1e-20);
        assert_eq!((g.y, g.z), (0.0, 0.0));
        let g2 = sphere_gravity(&Vec3::new(2000.0, 0.0, 0.0), 1e10).unwrap();
        assert!((g2.x / g.x - 0.25).abs() < 1e-15);
        assert!(sphere_gravity(&Vec3::zeros(), 1.0).is_err());
    }

    #[test]
    fn spherical_ellipsoid_matches_point_mass() {
        let m = model(200.0, 200.0, 200.0, 2500.0);
        let mut rng = SimRng::seed_from(17);
        for _ in 0..100 {
            let r = rng.unit_vector() * rng.uniform(201.0, 5000.0);
            let g = ellipsoid_gravity(&r, &m).unwrap();
            let expect = sphere_gravity(&r, m.mass()).unwrap();
            assert!((g - expect).norm() / expect.norm() < 1e-9);
        }
    }

    #[test]
    fn principal_axis_field_is_radial() {
        let m = model(300.0, 150.0, 150.0, 2000.0);
        for r in [
            Vec3::new(450.0, 0.0, 0.0),
            Vec3::new(0.0, -400.0, 0.0),
            Vec3::new(0.0, 0.0, 900.0),
        ] {
            let g = ellipsoid_gravity(&r, &m).unwrap();
            assert!(g.dot(&r) < 0.0);
            let cross = g.cross(&r.normalize()).norm();
            assert!(cross < 1e-12 * g.norm().max(1.0));
        }
    }

    #[test]
    fn far_field_matches_point_mass() {
        let m = model(300.0, 150.0, 150.0, 2000.0);
        let r = Vec3::new(0.0, 0.0, 100.0 * 300.0);
        let g = ellipsoid_gravity(&r, &m).unwrap();
        let p = sphere_gravity(&r, m.mass()).unwrap();
        assert!((g - p).norm() / p.norm() < 1e-3);
    }

    #[test]
    fn interior_point_rejected() {
        let m = model(300.0, 150.0, 150.0, 2000.0);
        assert!(matches!(
            ellipsoid_gravity(&Vec3::new(100.0, 10.0, 0.0), &m),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gravity_is_gradient_of_potential() {
        let m = model(280.0, 170.0, 170.0, 3000.0);
        let mut rng = SimRng::seed_from(4);
        let h = 0.01;
        for _ in 0..20 {
            let r = rng.unit_vector() * rng.uniform(350.0, 1500.0);
            let g = ellipsoid_gravity(&r, &m).unwrap();
            for i in 0..3 {
                let mut e = Vec3::zeros();
                e[i] = h;
                let du = (ellipsoid_potential(&(r + e), &m).unwrap()
                    - ellipsoid_potential(&(r - e), &m).unwrap())
                    / (2.0 * h);
                assert!((du - g[i]).abs() < 1e-6 * g.norm(), "{du} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn exterior_field_is_divergence_free() {
        let m = model(300.0, 160.0, 160.0, 1800.0);
        let mut rng = SimRng::seed_from(8);
        let h = 0.1;
        for _ in 0..50 {
            let r = rng.unit_vector() * rng.uniform(400.0, 2000.0);
            let g = ellipsoid_gravity(&r, &m).unwrap();
            let mut div = 0.0;
            for i in 0..3 {
                let mut e = Vec3::zeros();
                e[i] = h;
                let gp = ellipsoid_gravity(&(r + e), &m).unwrap();
                let gm = ellipsoid_gravity(&(r - e), &m).unwrap();
                div += (gp[i] - gm[i]) / (2.0 * h);
            }
            assert!(div.abs() < 1e-6 * g.norm() / h, "div {div}");
        }
    }

    #[test]
    fn continuity_under_small_perturbation() {
        let m = model(300.0, 150.0, 150.0, 5000.0);
        let mut rng = SimRng::seed_from(10);
        for _ in 0..50 {
            let r = rng.unit_vector() * rng.uniform(400.0, 1500.0);
            let dr = rng.unit_vector() * 1e-6;
            let d = (ellipsoid_gravity(&(r + dr), &m).unwrap() - ellipsoid_gravity(&r, &m).unwrap())
                .norm();
            assert!(d < 1e-9);
        }
    }

    #[test]
    fn confocal_parameter_solves_level_set() {
        let mut rng = SimRng::seed_from(12);
        for _ in 0..200 {
            let c = rng.uniform(150.0, 300.0);
            let a = rng.uniform(c, 300.0);
            let r = rng.unit_vector() * rng.uniform(a + 1.0, 3000.0);
            let k = confocal_parameter(&r, a, c, c).unwrap();
            let lhs = r.x * r.x / (a * a + k) + r.y * r.y / (c * c + k) + r.z * r.z / (c * c + k);
            assert!((lhs - 1.0).abs() < 1e-12);
        }
    }
}

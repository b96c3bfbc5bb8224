use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GRAVITATIONAL_CONSTANT;
use crate::math::{rk4_step, Mat3, Quaternion, SimRng, Vec3};
use crate::{Error, Result};

/// Closed interval for a uniformly sampled parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub min: f64,
    pub max: f64,
}

impl Range {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub const fn fixed(v: f64) -> Self {
        Self { min: v, max: v }
    }

    pub fn sample(&self, rng: &mut SimRng) -> f64 {
        rng.uniform(self.min, self.max)
    }

    pub fn contains(&self, v: f64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if !(self.min <= self.max) || !self.min.is_finite() || !self.max.is_finite() {
            return Err(Error::Config(format!(
                "range `{name}` has min {} > max {}",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

/// Uniform-density ellipsoidal asteroid with a nutating spin state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsteroidModel {
    /// Semi-axes in metres, `a ≥ b = c`.
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// kg/m³
    pub density: f64,
    /// Spin rate ω_o, rad/s.
    pub spin_rate: f64,
    /// Angle between the body z axis and the spin axis, rad.
    pub nutation: f64,
    /// Phase of the nutation cycle at t = 0, rad.
    pub phase: f64,
    /// Solar radiation pressure acceleration, constant in the asteroid frame.
    pub srp: Vec3,
}

impl AsteroidModel {
    /// A mid-range body; handy as a base for tests and examples.
    pub fn reference() -> Self {
        Self {
            a: 300.0,
            b: 150.0,
            c: 150.0,
            density: 2000.0,
            spin_rate: 1e-4,
            nutation: 60f64.to_radians(),
            phase: 0.0,
            srp: Vec3::zeros(),
        }
    }

    pub fn volume(&self) -> f64 {
        4.0 / 3.0 * PI * self.a * self.b * self.c
    }

    pub fn mass(&self) -> f64 {
        self.density * self.volume()
    }

    pub fn gm(&self) -> f64 {
        GRAVITATIONAL_CONSTANT * self.mass()
    }

    pub fn inertia(&self) -> Mat3 {
        asteroid_inertia(self.mass(), self.a, self.b, self.c)
    }

    /// `σ = (J_z − J_x) / J_x`.
    pub fn sigma(&self) -> f64 {
        let j = self.inertia();
        (j[(2, 2)] - j[(0, 0)]) / j[(0, 0)]
    }

    /// `ω_n = σ ω_o cos θ`.
    pub fn nutation_rate(&self) -> f64 {
        self.sigma() * self.spin_rate * self.nutation.cos()
    }

    /// `x²/a² + y²/b² + z²/c²`; values ≤ 1 are on or inside the body.
    pub fn level(&self, r: &Vec3) -> f64 {
        (r.x / self.a).powi(2) + (r.y / self.b).powi(2) + (r.z / self.c).powi(2)
    }

    pub fn contains(&self, r: &Vec3) -> bool {
        self.level(r) <= 1.0
    }

    /// Outward unit normal of the surface at (or radially through) `p`.
    pub fn surface_normal(&self, p: &Vec3) -> Vec3 {
        Vec3::new(
            p.x / (self.a * self.a),
            p.y / (self.b * self.b),
            p.z / (self.c * self.c),
        )
        .normalize()
    }

    /// Point drawn uniformly with respect to surface area (rejection from the
    /// sphere map, accepted with probability proportional to the area
    /// stretch).
    pub fn sample_surface_point(&self, rng: &mut SimRng) -> Vec3 {
        let min_axis = self.a.min(self.b).min(self.c);
        loop {
            let n = rng.unit_vector();
            let stretch = Vec3::new(n.x / self.a, n.y / self.b, n.z / self.c).norm() * min_axis;
            if rng.uniform(0.0, 1.0) < stretch {
                return Vec3::new(self.a * n.x, self.b * n.y, self.c * n.z);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.a >= self.b
            && (self.b - self.c).abs() <= 1e-9 * self.b
            && self.c > 0.0
            && self.density > 0.0
            && self.spin_rate >= 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("invalid asteroid model {self:?}")))
        }
    }
}

/// Principal inertia of a uniform ellipsoid,
/// `m/5 · diag(b² + c², a² + c², a² + b²)`.
pub fn asteroid_inertia(mass: f64, a: f64, b: f64, c: f64) -> Mat3 {
    Mat3::from_diagonal(&Vec3::new(b * b + c * c, a * a + c * c, a * a + b * b)) * (mass / 5.0)
}

/// Asteroid angular velocity in its own body frame at time `t`.
pub fn asteroid_omega(t: f64, model: &AsteroidModel) -> Vec3 {
    let (s, c) = model.nutation.sin_cos();
    let angle = model.nutation_rate() * t + model.phase;
    let (sa, ca) = angle.sin_cos();
    model.spin_rate * Vec3::new(s * ca, s * sa, c)
}

/// Inertial attitude of the asteroid-fixed frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsteroidAttitude {
    /// `[AN]`: inertial → asteroid-fixed.
    pub q: Quaternion,
    pub t: f64,
}

impl Default for AsteroidAttitude {
    fn default() -> Self {
        Self {
            q: Quaternion::IDENTITY,
            t: 0.0,
        }
    }
}

/// One RK4 step of the asteroid attitude kinematics driven by
/// [`asteroid_omega`].
pub fn propagate_asteroid_attitude(
    att: &AsteroidAttitude,
    model: &AsteroidModel,
    dt: f64,
) -> Result<AsteroidAttitude> {
    let y = rk4_step(
        |t, y: &[f64; 4]| Quaternion::from_array(*y).derivative(&asteroid_omega(t, model)),
        att.t,
        &att.q.to_array(),
        dt,
    )?;
    Ok(AsteroidAttitude {
        q: Quaternion::from_array(y).normalize(),
        t: att.t + dt,
    })
}

/// Sampling ranges for randomized asteroids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AsteroidRanges {
    /// Smallest semi-axis; `b` is set equal to it.
    pub c: Range,
    /// Upper bound of the long semi-axis; its lower bound is the drawn `b`.
    pub a_max: f64,
    pub density: Range,
    pub spin_rate: Range,
    /// Nutation angle, degrees.
    pub nutation_deg: Range,
    /// Per-component SRP acceleration, m/s².
    pub srp: Range,
}

impl Default for AsteroidRanges {
    fn default() -> Self {
        Self {
            c: Range::new(150.0, 300.0),
            a_max: 300.0,
            density: Range::new(500.0, 5000.0),
            spin_rate: Range::new(1e-6, 5e-4),
            nutation_deg: Range::new(45.0, 90.0),
            srp: Range::new(-100e-6, 100e-6),
        }
    }
}

impl AsteroidRanges {
    pub fn validate(&self) -> Result<()> {
        self.c.validate("asteroid.c")?;
        self.density.validate("asteroid.density")?;
        self.spin_rate.validate("asteroid.spin_rate")?;
        self.nutation_deg.validate("asteroid.nutation_deg")?;
        self.srp.validate("asteroid.srp")?;
        if self.a_max < self.c.max || self.c.min <= 0.0 {
            return Err(Error::Config(
                "asteroid.a_max must be at least c.max and c must be positive".into(),
            ));
        }
        Ok(())
    }
}

pub fn sample_asteroid(rng: &mut SimRng, ranges: &AsteroidRanges) -> AsteroidModel {
    let c = ranges.c.sample(rng);
    let b = c;
    let a = rng.uniform(b, ranges.a_max);
    let density = ranges.density.sample(rng);
    let spin_rate = ranges.spin_rate.sample(rng);
    let nutation = ranges.nutation_deg.sample(rng).to_radians();
    let srp = Vec3::new(
        ranges.srp.sample(rng),
        ranges.srp.sample(rng),
        ranges.srp.sample(rng),
    );
    let phase = rng.uniform(-PI, PI);
    AsteroidModel {
        a,
        b,
        c,
        density,
        spin_rate,
        nutation,
        phase,
        srp,
    }
}

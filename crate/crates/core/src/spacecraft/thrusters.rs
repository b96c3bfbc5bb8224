use serde::{Deserialize, Serialize};

use crate::math::{Quaternion, SimRng, Vec3};

pub const NUM_THRUSTERS: usize = 12;

/// Body-frame thruster locations for the 2 m cube, m.
pub const TABLE_POSITIONS: [[f64; 3]; NUM_THRUSTERS] = [
    [-1.0, 0.0, 0.4],
    [-1.0, 0.0, -0.4],
    [1.0, 0.0, 0.4],
    [1.0, 0.0, -0.4],
    [-0.4, -1.0, 0.0],
    [0.4, -1.0, 0.0],
    [-0.4, 1.0, 0.0],
    [0.4, 1.0, 0.0],
    [0.0, -0.4, -1.0],
    [0.0, 0.4, -1.0],
    [0.0, -0.4, 1.0],
    [0.0, 0.4, 1.0],
];

/// On/off flag per thruster.
pub type ThrusterCommand = [bool; NUM_THRUSTERS];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThrusterConfig {
    pub positions: [Vec3; NUM_THRUSTERS],
    pub directions: [Vec3; NUM_THRUSTERS],
    /// Nominal thrust, N.
    pub thrust: f64,
    /// Multiplier on nominal thrust; below one for a degraded thruster.
    pub failure_scale: [f64; NUM_THRUSTERS],
}

impl ThrusterConfig {
    /// Reference layout with positions multiplied by `length_scale`.
    pub fn scaled(length_scale: f64, thrust: f64) -> Self {
        let positions = TABLE_POSITIONS.map(|p| Vec3::from(p) * length_scale);
        let directions = TABLE_POSITIONS.map(|p| {
            // The face is the axis with the unit coordinate; push inward.
            let axis = (0..3)
                .max_by(|&i, &j| p[i].abs().total_cmp(&p[j].abs()))
                .expect("three axes");
            let mut d = Vec3::zeros();
            d[axis] = -p[axis].signum();
            d
        });
        Self {
            positions,
            directions,
            thrust,
            failure_scale: [1.0; NUM_THRUSTERS],
        }
    }

    /// Delivered thrust of thruster `i` when fired, N.
    pub fn delivered(&self, i: usize) -> f64 {
        self.thrust * self.failure_scale[i]
    }

    /// Index of the failed thruster, if any.
    pub fn failed(&self) -> Option<usize> {
        self.failure_scale.iter().position(|&s| s < 1.0)
    }
}

/// Body-frame force and torque about the centre of mass,
/// `F = Σ d⁽ⁱ⁾ T⁽ⁱ⁾`, `L = Σ (r⁽ⁱ⁾ − r_com) × d⁽ⁱ⁾ T⁽ⁱ⁾`.
pub fn body_force_torque(cmd: &ThrusterCommand, cfg: &ThrusterConfig, r_com: &Vec3) -> (Vec3, Vec3) {
    let mut force = Vec3::zeros();
    let mut torque = Vec3::zeros();
    for (i, _) in cmd.iter().enumerate().filter(|(_, &on)| on) {
        let f = cfg.directions[i] * cfg.delivered(i);
        force += f;
        torque += (cfg.positions[i] - r_com).cross(&f);
    }
    (force, torque)
}

/// `F_N = [BN](q)ᵀ F_B`.
pub fn body_to_inertial(force_body: &Vec3, q: &Quaternion) -> Vec3 {
    q.to_reference(force_body)
}

/// With probability `p_fail`, degrade one uniformly chosen thruster to a
/// fraction of nominal drawn from `[f_min, f_max]`.
pub fn apply_actuator_failure(
    base: &ThrusterConfig,
    rng: &mut SimRng,
    p_fail: f64,
    f_min: f64,
    f_max: f64,
) -> ThrusterConfig {
    let mut cfg = base.clone();
    cfg.failure_scale = [1.0; NUM_THRUSTERS];
    if rng.chance(p_fail) {
        let i = rng.index(NUM_THRUSTERS);
        cfg.failure_scale[i] = rng.uniform(f_min, f_max);
    }
    cfg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cmd(on: &[usize]) -> ThrusterCommand {
        let mut c = [false; NUM_THRUSTERS];
        for &i in on {
            c[i - 1] = true;
        }
        c
    }

    #[test]
    fn directions_are_unit_and_inward() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        for i in 0..NUM_THRUSTERS {
            assert!((cfg.directions[i].norm() - 1.0).abs() < 1e-15);
            assert!(cfg.directions[i].dot(&cfg.positions[i]) < 0.0);
        }
        assert_eq!(cfg.directions[0], Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(cfg.directions[10], Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn all_off_is_zero() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        let (f, l) = body_force_torque(&[false; 12], &cfg, &Vec3::zeros());
        assert_eq!((f, l), (Vec3::zeros(), Vec3::zeros()));
    }

    #[test]
    fn pair_one_two_translates() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        let (f, l) = body_force_torque(&cmd(&[1, 2]), &cfg, &Vec3::zeros());
        assert_eq!(f, Vec3::new(2.0, 0.0, 0.0));
        assert!(l.norm() < 1e-15);
    }

    #[test]
    fn single_thruster_pitches() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        let (f, l) = body_force_torque(&cmd(&[1]), &cfg, &Vec3::zeros());
        assert_eq!(f, Vec3::new(1.0, 0.0, 0.0));
        assert!((l - Vec3::new(0.0, 0.4, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn every_face_pair_translates_without_torque() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        for pair in [[1, 2], [3, 4], [5, 6], [7, 8], [9, 10], [11, 12]] {
            let (f, l) = body_force_torque(&cmd(&pair), &cfg, &Vec3::zeros());
            assert!((f.norm() - 2.0).abs() < 1e-15);
            assert!(l.norm() < 1e-12);
        }
    }

    #[test]
    fn opposite_face_diagonal_pairs_rotate_without_translation() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        for pair in [[1, 4], [2, 3], [5, 8], [6, 7], [9, 12], [10, 11]] {
            let (f, l) = body_force_torque(&cmd(&pair), &cfg, &Vec3::zeros());
            assert!(f.norm() < 1e-15);
            assert!((l.norm() - 0.8).abs() < 1e-12, "{pair:?}: {l}");
        }
    }

    #[test]
    fn com_offset_shifts_torque() {
        let cfg = ThrusterConfig::scaled(1.0, 1.0);
        let com = Vec3::new(0.0, 0.0, 0.1);
        let (_, l) = body_force_torque(&cmd(&[1, 2]), &cfg, &com);
        // Lever arm −0.1 ẑ on a net +2 x̂ force: (−0.1 ẑ) × 2 x̂ = −0.2 ŷ.
        assert!((l - Vec3::new(0.0, -0.2, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn body_to_inertial_round_trip() {
        let q = Quaternion::new(0.3, -0.5, 0.7, 0.2).normalize();
        let f = Vec3::new(1.0, -2.0, 0.5);
        let back = q.to_body(&body_to_inertial(&f, &q));
        assert!((back - f).norm() < 1e-12);
        assert_eq!(body_to_inertial(&f, &Quaternion::IDENTITY), f);
        let qz = Quaternion::from_axis_angle(&Vec3::z(), std::f64::consts::FRAC_PI_2);
        assert!((body_to_inertial(&Vec3::x(), &qz) - Vec3::y()).norm() < 1e-15);
    }

    #[test]
    fn failure_probability_and_scale() {
        let base = ThrusterConfig::scaled(1.0, 1.0);
        let mut rng = SimRng::seed_from(77);
        let never = apply_actuator_failure(&base, &mut rng, 0.0, 0.5, 1.0);
        assert_eq!(never.failure_scale, [1.0; 12]);

        let n = 10_000;
        let mut failed = 0;
        for _ in 0..n {
            let cfg = apply_actuator_failure(&base, &mut rng, 0.5, 0.5, 0.5);
            let degraded: Vec<_> = cfg.failure_scale.iter().filter(|&&s| s < 1.0).collect();
            assert!(degraded.len() <= 1);
            if let Some(&&s) = degraded.first() {
                assert_eq!(s, 0.5);
                failed += 1;
            }
        }
        let frac = failed as f64 / n as f64;
        assert!((frac - 0.5).abs() < 0.02, "{frac}");

        let no_effect = apply_actuator_failure(&base, &mut rng, 1.0, 1.0, 1.0);
        assert_eq!(no_effect.failure_scale, [1.0; 12]);
    }

    #[test]
    fn failure_scales_force_linearly() {
        let mut cfg = ThrusterConfig::scaled(1.0, 1.0);
        cfg.failure_scale[0] = 0.5;
        let (f, _) = body_force_torque(&cmd(&[1]), &cfg, &Vec3::zeros());
        assert_eq!(f, Vec3::new(0.5, 0.0, 0.0));
    }
}

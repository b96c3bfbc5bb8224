//! Oracle suite run by `validate`. Each check takes the function under test
//! as a parameter so deliberately broken variants can be fed in.

use serde::{Deserialize, Serialize};

use super::RunConfig;
use crate::asteroid::{ellipsoid_gravity, sphere_gravity, AsteroidModel, GRAVITATIONAL_CONSTANT};
use crate::env::LandingEnv;
use crate::math::{cone_direction, rk4_step, Mat3, Quaternion, SimRng, Vec3};
use crate::neural::{check_gradient, NetSizes, RecurrentNet, StepCache};
use crate::seeker::{measure, seeker_angles, SensorBias, SeekerTruth};
use crate::spacecraft::{rotational_dynamics, translational_dynamics, ThrusterCommand};
use crate::Result;

pub type GravityFn = fn(&Vec3, &AsteroidModel) -> Result<Vec3>;
pub type TranslationalFn = fn(&Vec3, &Vec3, &Vec3, f64, &Vec3, &Vec3, &Vec3) -> Vec3;
pub type RotationalFn = fn(&Vec3, &Mat3, &Mat3, &Vec3, &Vec3) -> Result<Vec3>;
pub type SeekerFn = fn(&Vec3, &Quaternion) -> Result<(f64, f64)>;
pub type BackwardFn = fn(&RecurrentNet, &[StepCache], &[Vec<f64>], &mut [f64]) -> Vec<f64>;
pub type StepperFn = fn(&dyn Fn(f64, &[f64; 2]) -> [f64; 2], f64, &[f64; 2], f64) -> Result<[f64; 2]>;

const VALIDATION_SEED: u64 = 0x0A11_C0DE;

/// The functions exercised by the suite.
#[derive(Clone, Copy)]
pub struct Oracles {
    pub gravity: GravityFn,
    pub translational: TranslationalFn,
    pub rotational: RotationalFn,
    pub seeker: SeekerFn,
    pub backward: BackwardFn,
    pub stepper: StepperFn,
}

impl Default for Oracles {
    fn default() -> Self {
        Self {
            gravity: ellipsoid_gravity,
            translational: translational_dynamics,
            rotational: rotational_dynamics,
            seeker: seeker_angles,
            backward: |net, caches, d_out, grad| net.backward_sequence(caches, d_out, grad),
            stepper: |f, t, y, dt| rk4_step(|t, y| f(t, y), t, y, dt),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl CheckResult {
    fn at_most(name: &str, measured: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.to_string(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        }
    }

    fn error(name: &str, tolerance: f64, e: crate::Error) -> Self {
        Self {
            name: name.to_string(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: e.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn lines(&self) -> Vec<String> {
        self.checks
            .iter()
            .map(|c| {
                format!(
                    "{} {:<24} measured {:.3e}  tolerance {:.1e}  {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.name,
                    c.measured,
                    c.tolerance,
                    c.detail
                )
            })
            .collect()
    }
}

fn rel(a: &Vec3, b: &Vec3) -> f64 {
    (a - b).norm() / b.norm()
}

/// Ellipsoid field with equal semi-axes against the point-mass field at
/// `points` random exterior points. Measured: largest relative error.
pub fn check_gravity_sphere(gravity: GravityFn, points: usize, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let radius = rng.uniform(100.0, 400.0);
        let model = AsteroidModel {
            a: radius,
            b: radius,
            c: radius,
            density: rng.uniform(500.0, 5000.0),
            ..AsteroidModel::reference()
        };
        let r = rng.unit_vector() * radius * rng.uniform(1.001, 20.0);
        let got = match gravity(&r, &model) {
            Ok(g) => g,
            Err(e) => return CheckResult::error("gravity_sphere", TOL, e),
        };
        let want = sphere_gravity(&r, model.mass()).expect("nonzero radius");
        worst = worst.max(rel(&got, &want));
    }
    CheckResult::at_most("gravity_sphere", worst, TOL, format!("{points} exterior points"))
}

/// Triaxial body at 100 long semi-axes against a point mass.
pub fn check_gravity_far_field(gravity: GravityFn, points: usize, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-3;
    let mut worst: f64 = 0.0;
    for _ in 0..points {
        let b = rng.uniform(150.0, 300.0);
        let model = AsteroidModel {
            a: rng.uniform(b, 2.0 * b),
            b,
            c: b,
            ..AsteroidModel::reference()
        };
        let r = rng.unit_vector() * 100.0 * model.a;
        let got = match gravity(&r, &model) {
            Ok(g) => g,
            Err(e) => return CheckResult::error("gravity_far_field", TOL, e),
        };
        let want = sphere_gravity(&r, model.mass()).expect("nonzero radius");
        worst = worst.max(rel(&got, &want));
    }
    CheckResult::at_most("gravity_far_field", worst, TOL, format!("{points} points at r = 100a"))
}

/// Divergence of the exterior field by central differences, relative to
/// `‖g‖ / ‖r‖`.
pub fn check_gravity_laplacian(gravity: GravityFn, points: usize, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-5;
    const H: f64 = 0.1;
    let mut worst: f64 = 0.0;
    let model = AsteroidModel::reference();
    for _ in 0..points {
        let r = rng.unit_vector() * rng.uniform(1.3, 4.0) * model.a;
        let mut div = 0.0;
        for k in 0..3 {
            let mut e = Vec3::zeros();
            e[k] = H;
            let (up, down) = match (gravity(&(r + e), &model), gravity(&(r - e), &model)) {
                (Ok(u), Ok(d)) => (u, d),
                (Err(e), _) | (_, Err(e)) => return CheckResult::error("gravity_laplacian", TOL, e),
            };
            div += (up[k] - down[k]) / (2.0 * H);
        }
        let scale = match gravity(&r, &model) {
            Ok(g) => g.norm() / r.norm(),
            Err(e) => return CheckResult::error("gravity_laplacian", TOL, e),
        };
        worst = worst.max(div.abs() / scale);
    }
    CheckResult::at_most("gravity_laplacian", worst, TOL, format!("{points} exterior points"))
}

/// Rotating-frame acceleration for bodies on circular inertial orbits. A
/// co-rotating body must stay put; one orbiting at a different rate must
/// show the centripetal acceleration of its apparent circular motion.
/// Measured: largest error, m/s².
pub fn check_circular_balance(translational: TranslationalFn, cases: usize, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-9;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let axis = rng.unit_vector();
        let radius = rng.uniform(400.0, 2000.0);
        let mass = rng.uniform(1e10, 1e12);
        let n = (GRAVITATIONAL_CONSTANT * mass / radius.powi(3)).sqrt();
        let r = cone_direction(&axis, std::f64::consts::FRAC_PI_2, rng.uniform(-3.0, 3.0)) * radius;
        let g = sphere_gravity(&r, mass).expect("nonzero radius");
        let zero = Vec3::zeros();

        let a = translational(&r, &zero, &zero, 1.0, &zero, &g, &(axis * n));
        worst = worst.max(a.norm());

        let s = rng.uniform(0.2, 0.8);
        let rel_rate = (1.0 - s) * n;
        let v = (axis * rel_rate).cross(&r);
        let a = translational(&r, &v, &zero, 1.0, &zero, &g, &(axis * (s * n)));
        let want = -rel_rate * rel_rate * r;
        worst = worst.max((a - want).norm());
    }
    CheckResult::at_most("circular_balance", worst, TOL, format!("{cases} orbits, two frame rates each"))
}

/// Torque-free tumble for 1000 s at 2 s steps; inertial angular momentum
/// drift relative to its initial magnitude.
pub fn check_momentum_conservation(rotational: RotationalFn, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-5;
    let axes = Quaternion::from_axis_angle(&rng.unit_vector(), rng.uniform(0.0, 3.0)).dcm();
    let j = axes.transpose() * Mat3::from_diagonal(&Vec3::new(280.0, 330.0, 410.0)) * axes;
    let w0 = Vec3::new(rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05), rng.uniform(-0.05, 0.05));
    let h_of = |y: &[f64; 7]| {
        let q = Quaternion::new(y[0], y[1], y[2], y[3]);
        q.to_reference(&(j * Vec3::new(y[4], y[5], y[6])))
    };
    let mut y = [1.0, 0.0, 0.0, 0.0, w0.x, w0.y, w0.z];
    let h0 = h_of(&y);
    let dt = 2.0;
    let mut worst: f64 = 0.0;
    for k in 0..500 {
        let mut failure = None;
        let next = rk4_step(
            |_, s: &[f64; 7]| {
                let q = Quaternion::new(s[0], s[1], s[2], s[3]);
                let w = Vec3::new(s[4], s[5], s[6]);
                let qd = q.derivative(&w);
                let wd = match rotational(&w, &j, &Mat3::zeros(), &Vec3::zeros(), &Vec3::zeros()) {
                    Ok(wd) => wd,
                    Err(e) => {
                        failure = Some(e);
                        Vec3::repeat(f64::NAN)
                    }
                };
                [qd[0], qd[1], qd[2], qd[3], wd.x, wd.y, wd.z]
            },
            k as f64 * dt,
            &y,
            dt,
        );
        y = match (next, failure) {
            (_, Some(e)) | (Err(e), None) => return CheckResult::error("momentum_conservation", TOL, e),
            (Ok(y), None) => y,
        };
        let q = Quaternion::new(y[0], y[1], y[2], y[3]).normalize();
        y[..4].copy_from_slice(&q.to_array());
        worst = worst.max((h_of(&y) - h0).norm() / h0.norm());
    }
    CheckResult::at_most("momentum_conservation", worst, TOL, "1000 s torque-free tumble, dt = 2 s".into())
}

/// Seeker angles against projection onto the seeker axes taken as rows of
/// the direction cosine matrix.
pub fn check_seeker_projection(seeker: SeekerFn, cases: usize, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-12;
    let mut worst: f64 = 0.0;
    for _ in 0..cases {
        let q0 = Quaternion::new(
            rng.standard_normal(),
            rng.standard_normal(),
            rng.standard_normal(),
            rng.standard_normal(),
        )
        .normalize();
        let r = rng.unit_vector() * rng.uniform(1.0, 1000.0);
        let c = q0.dcm();
        let lhat = r / r.norm();
        let ou = lhat.dot(&Vec3::new(c[(0, 0)], c[(0, 1)], c[(0, 2)])).asin();
        let ov = lhat.dot(&Vec3::new(c[(1, 0)], c[(1, 1)], c[(1, 2)])).asin();
        match seeker(&r, &q0) {
            Ok((u, v)) => worst = worst.max((u - ou).abs()).max((v - ov).abs()),
            Err(e) => return CheckResult::error("seeker_projection", TOL, e),
        }
    }
    CheckResult::at_most("seeker_projection", worst, TOL, format!("{cases} random geometries"))
}

/// Measured angles must not depend on the vehicle attitude once the seeker
/// frame is latched. Measured: largest difference, rad (exactly zero).
pub fn check_seeker_invariance(cases: usize, rng: &mut SimRng) -> CheckResult {
    let mut worst: f64 = 0.0;
    let bias = SensorBias::none();
    for _ in 0..cases {
        let q0 = Quaternion::from_axis_angle(&rng.unit_vector(), rng.uniform(0.0, 0.3));
        let r_tm = q0.to_reference(&Vec3::new(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), -1.0)) * 900.0;
        let omega = Vec3::zeros();
        let base = SeekerTruth { r_tm, q: q0, q0, omega };
        let tilted = SeekerTruth {
            q: q0 * Quaternion::from_axis_angle(&rng.unit_vector(), rng.uniform(0.0, 0.5)),
            ..base.clone()
        };
        let (a, b) = (
            measure(&base, &bias, &mut SimRng::seed_from(1)),
            measure(&tilted, &bias, &mut SimRng::seed_from(1)),
        );
        if let (Ok(a), Ok(b)) = (a, b) {
            worst = worst.max((a.theta_u - b.theta_u).abs()).max((a.theta_v - b.theta_v).abs());
        } else {
            worst = f64::INFINITY;
        }
    }
    CheckResult::at_most("seeker_invariance", worst, 0.0, format!("{cases} attitude perturbations"))
}

/// BPTT gradient of a reduced GRU network against central differences at
/// 100 random parameters.
pub fn check_bptt_gradient(backward: BackwardFn, rng: &mut SimRng) -> CheckResult {
    const TOL: f64 = 1e-4;
    let sizes = NetSizes {
        input: 4,
        h1: 6,
        h2: 5,
        h3: 6,
        output: 3,
    };
    let mut net = RecurrentNet::new(sizes, 1.0, rng);
    let seq = |rng: &mut SimRng, n: usize, d: usize| -> Vec<Vec<f64>> {
        (0..n).map(|_| (0..d).map(|_| rng.uniform(-1.0, 1.0)).collect()).collect()
    };
    let xs = seq(rng, 8, sizes.input);
    let coeffs = seq(rng, 8, sizes.output);
    let h0: Vec<f64> = (0..sizes.h2).map(|_| rng.uniform(-0.5, 0.5)).collect();
    // Squared projections keep the loss nonlinear in every output.
    let loss = |p: &[f64]| -> f64 {
        let n = RecurrentNet { sizes, params: p.to_vec() };
        n.forward_sequence(&xs, &h0)
            .iter()
            .zip(&coeffs)
            .map(|(c, w)| c.out.iter().zip(w).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum()
    };
    let caches = net.forward_sequence(&xs, &h0);
    let d_out: Vec<Vec<f64>> = caches
        .iter()
        .zip(&coeffs)
        .map(|(c, w)| {
            let s: f64 = c.out.iter().zip(w).map(|(a, b)| a * b).sum();
            w.iter().map(|wi| 2.0 * s * wi).collect()
        })
        .collect();
    let mut grad = vec![0.0; net.params.len()];
    backward(&net, &caches, &d_out, &mut grad);
    let report = check_gradient(&mut net.params, &grad, loss, 100, 1e-6, rng);
    CheckResult::at_most(
        "bptt_gradient",
        report.max_rel_error,
        TOL,
        format!("100 probes, worst parameter {}", report.worst_index),
    )
}

/// Observed convergence order on a harmonic oscillator, from the global
/// error at two step sizes. Measured: `|order − 4|`.
pub fn check_rk4_order(stepper: StepperFn) -> CheckResult {
    const TOL: f64 = 0.2;
    let f = |_: f64, y: &[f64; 2]| [y[1], -y[0]];
    let global_error = |dt: f64| -> Result<f64> {
        let n = (10.0 / dt).round() as usize;
        let mut y = [1.0, 0.0];
        for k in 0..n {
            y = stepper(&f, k as f64 * dt, &y, dt)?;
        }
        let t = n as f64 * dt;
        Ok(((y[0] - t.cos()).powi(2) + (y[1] + t.sin()).powi(2)).sqrt())
    };
    match (global_error(0.1), global_error(0.05)) {
        (Ok(e1), Ok(e2)) => {
            let order = (e1 / e2).log2();
            CheckResult::at_most("rk4_order", (order - 4.0).abs(), TOL, format!("observed order {order:.3}"))
        }
        (Err(e), _) | (_, Err(e)) => CheckResult::error("rk4_order", TOL, e),
    }
}

/// Reset and fly a few coasting steps in both episode configurations.
pub fn check_episode_smoke(cfg: &RunConfig) -> CheckResult {
    let run = || -> Result<usize> {
        let mut bad = 0;
        for ep_cfg in [&cfg.training_env, &cfg.eval_env] {
            let mut env = LandingEnv::new(ep_cfg.clone())?;
            for seed in 0..4 {
                let obs = env.reset(cfg.seed ^ seed)?;
                bad += usize::from(!obs.is_finite());
                for _ in 0..5 {
                    let s = env.step(&ThrusterCommand::default())?;
                    bad += usize::from(!s.reward.is_finite());
                    if s.done {
                        break;
                    }
                }
            }
        }
        Ok(bad)
    };
    match run() {
        Ok(bad) => CheckResult::at_most("episode_smoke", bad as f64, 0.0, "8 episodes, 5 coast steps".into()),
        Err(e) => CheckResult::error("episode_smoke", 0.0, e),
    }
}

/// Full oracle suite with the given functions under test.
pub fn run_validate_with(oracles: &Oracles, cfg: Option<&RunConfig>) -> ValidationReport {
    let mut rng = SimRng::seed_from(VALIDATION_SEED);
    let mut checks = vec![
        check_gravity_sphere(oracles.gravity, 100, &mut rng),
        check_gravity_far_field(oracles.gravity, 100, &mut rng),
        check_gravity_laplacian(oracles.gravity, 50, &mut rng),
        check_circular_balance(oracles.translational, 50, &mut rng),
        check_momentum_conservation(oracles.rotational, &mut rng),
        check_seeker_projection(oracles.seeker, 1000, &mut rng),
        check_seeker_invariance(200, &mut rng),
        check_bptt_gradient(oracles.backward, &mut rng),
        check_rk4_order(oracles.stepper),
    ];
    if let Some(cfg) = cfg {
        checks.push(check_episode_smoke(cfg));
    }
    ValidationReport { checks }
}

pub fn run_validate(cfg: Option<&RunConfig>) -> ValidationReport {
    run_validate_with(&Oracles::default(), cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pristine_suite_passes() {
        let cfg = RunConfig::from_toml_str("").unwrap();
        let report = run_validate(Some(&cfg));
        for line in report.lines() {
            println!("{line}");
        }
        assert!(report.all_passed());
        assert_eq!(report.checks.len(), 10);
    }

    #[test]
    fn coriolis_sign_flip_fails_circular_balance() {
        let flipped: TranslationalFn = |r, v, f, m, a_env, g, w| {
            f / m + a_env + g - 2.0 * v.cross(w) + w.cross(r).cross(w)
        };
        let mut rng = SimRng::seed_from(1);
        assert!(check_circular_balance(translational_dynamics, 20, &mut rng).passed);
        let c = check_circular_balance(flipped, 20, &mut rng);
        assert!(!c.passed, "{c:?}");
    }

    #[test]
    fn gru_gradient_bug_fails_gradient_check() {
        // Drops the gradient of every second parameter, as a forgotten
        // accumulation in the backward pass would.
        let broken: BackwardFn = |net, caches, d_out, grad| {
            let dh = net.backward_sequence(caches, d_out, grad);
            for g in grad.iter_mut().step_by(2) {
                *g = 0.0;
            }
            dh
        };
        let mut rng = SimRng::seed_from(2);
        assert!(!check_bptt_gradient(broken, &mut rng).passed);
    }

    #[test]
    fn euler_stepper_fails_order_check() {
        let euler: StepperFn = |f, t, y, dt| {
            let k = f(t, y);
            Ok([y[0] + dt * k[0], y[1] + dt * k[1]])
        };
        assert!(!check_rk4_order(euler).passed);
    }

    #[test]
    fn wrong_gravity_fails_sphere_check() {
        let scaled: GravityFn = |r, m| ellipsoid_gravity(r, m).map(|g| g * (1.0 + 1e-6));
        let mut rng = SimRng::seed_from(3);
        assert!(!check_gravity_sphere(scaled, 10, &mut rng).passed);
    }
}

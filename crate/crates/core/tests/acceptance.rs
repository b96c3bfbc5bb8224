//! Acceptance criteria. Every test prints one `ACCEPTANCE #n ... PASS|FAIL`
//! line with the measured value and its tolerance, then asserts.

use std::time::Instant;

use asteroid_gnc::asteroid::{asteroid_omega, AsteroidModel};
use asteroid_gnc::env::{
    discretize_action, step_reward, EpisodeConfig, LandingEnv, Outcome, RewardParams, ViolationKind,
};
use asteroid_gnc::harness::{
    check_bptt_gradient, check_circular_balance, check_gravity_far_field, check_gravity_sphere,
    check_momentum_conservation, check_seeker_invariance, check_seeker_projection, initial_checkpoint, run_eval,
    run_train, Checkpoint, RunConfig,
};
use asteroid_gnc::math::{Mat3, Quaternion, SimRng, Vec3};
use asteroid_gnc::ppo::{collect_rollouts, DoubleIntegrator, PpoConfig, Trainer};
use asteroid_gnc::seeker::{velocity_reference, SensorRanges, VelocityReferenceParams};
use asteroid_gnc::spacecraft::{
    body_force_torque, box_inertia, mass_flow, rotational_dynamics, translational_dynamics, ThrusterCommand,
    VehicleParams, G_REF, NUM_THRUSTERS,
};

fn line(n: u32, name: &str, passed: bool, detail: &str) -> bool {
    println!(
        "ACCEPTANCE #{n} {name}: {}  {detail}",
        if passed { "PASS" } else { "FAIL" }
    );
    passed
}

fn fired(idx: &[usize]) -> ThrusterCommand {
    let mut c = [false; NUM_THRUSTERS];
    for &i in idx {
        c[i] = true;
    }
    c
}

#[test]
fn criterion_1_gravity_oracle() {
    let t0 = Instant::now();
    let mut rng = SimRng::seed_from(101);
    let sphere = check_gravity_sphere(asteroid_gnc::asteroid::ellipsoid_gravity, 100, &mut rng);
    let far = check_gravity_far_field(asteroid_gnc::asteroid::ellipsoid_gravity, 100, &mut rng);
    let secs = t0.elapsed().as_secs_f64();
    let ok = line(
        1,
        "gravity oracle",
        sphere.passed && far.passed && secs < 1.0,
        &format!(
            "sphere rel err {:.2e} (< 1e-9), far-field rel err {:.2e} (< 1e-3), runtime {secs:.3} s (< 1 s)",
            sphere.measured, far.measured
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_2_rotating_frame_physics() {
    let mut rng = SimRng::seed_from(202);
    let balance = check_circular_balance(translational_dynamics, 100, &mut rng);
    let momentum = check_momentum_conservation(rotational_dynamics, &mut rng);
    let ok = line(
        2,
        "rotating-frame physics",
        balance.passed && momentum.passed,
        &format!(
            "circular balance {:.2e} m/s² (< 1e-9), angular momentum drift {:.2e} (< 1e-5) over 1000 s at dt = 2 s",
            balance.measured, momentum.measured
        ),
    );
    assert!(ok);
}

/// Two copies of one episode, one with the vehicle attitude perturbed after
/// latch, coast for several steps; measured angles must agree bit for bit.
fn episode_invariance_gap() -> f64 {
    let cfg = EpisodeConfig {
        sensor: SensorRanges::default(),
        ..EpisodeConfig::default()
    };
    let mut worst: f64 = 0.0;
    for seed in 0..20 {
        let mut a = LandingEnv::new(cfg.clone()).unwrap();
        a.reset(seed).unwrap();
        let mut b = a.clone();
        let tilt = Quaternion::from_axis_angle(&Vec3::new(0.3, -0.5, 0.8), 0.2);
        let q = b.state().q;
        b.state_mut().q = q * tilt;
        for _ in 0..5 {
            let sa = a.step(&[false; NUM_THRUSTERS]).unwrap();
            let sb = b.step(&[false; NUM_THRUSTERS]).unwrap();
            worst = worst
                .max((sa.observation.theta_u - sb.observation.theta_u).abs())
                .max((sa.observation.theta_v - sb.observation.theta_v).abs());
            if sa.done || sb.done {
                break;
            }
        }
    }
    worst
}

#[test]
fn criterion_3_seeker_geometry() {
    let mut rng = SimRng::seed_from(303);
    let projection = check_seeker_projection(asteroid_gnc::seeker::seeker_angles, 10_000, &mut rng);
    let invariance = check_seeker_invariance(1000, &mut rng);
    let episode_gap = episode_invariance_gap();
    let ok = line(
        3,
        "seeker geometry",
        projection.passed && invariance.passed && episode_gap == 0.0,
        &format!(
            "projection err {:.2e} rad (< 1e-12), invariance gap {:.1e} / in-episode gap {:.1e} rad (exactly 0)",
            projection.measured, invariance.measured, episode_gap
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_4_equation_examples() {
    let mut errs: Vec<(&str, f64)> = Vec::new();

    // Uniform-cube inertia.
    let j = box_inertia(480.0, 2.0, 2.0, 2.0);
    errs.push(("cube inertia", (j - Mat3::from_diagonal_element(320.0)).amax()));
    let j = box_inertia(5.0, 0.2, 0.2, 0.2);
    errs.push(("lander inertia", (j - Mat3::from_diagonal_element(5.0 * 0.08 / 12.0)).amax()));

    // Thruster force and torque.
    let thr = VehicleParams::spacecraft().thrusters();
    let (f, l) = body_force_torque(&fired(&[0, 1]), &thr, &Vec3::zeros());
    errs.push(("pair force", (f - Vec3::new(2.0, 0.0, 0.0)).norm() + l.norm()));
    let (f, l) = body_force_torque(&fired(&[0]), &thr, &Vec3::zeros());
    errs.push((
        "single thruster",
        (f - Vec3::new(1.0, 0.0, 0.0)).norm() + (l - Vec3::new(0.0, 0.4, 0.0)).norm(),
    ));

    // Euler's equations.
    let wd = rotational_dynamics(
        &Vec3::zeros(),
        &Mat3::from_diagonal_element(320.0),
        &Mat3::zeros(),
        &Vec3::new(0.0, 0.4, 0.0),
        &Vec3::zeros(),
    )
    .unwrap();
    errs.push(("euler", (wd - Vec3::new(0.0, 0.00125, 0.0)).norm()));

    // Quaternion kinematics.
    let qd = Quaternion::IDENTITY.derivative(&Vec3::new(0.1, 0.0, 0.0));
    errs.push((
        "kinematics",
        qd.iter().zip([0.0, 0.05, 0.0, 0.0]).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max),
    ));

    // Coriolis sign in the rotating frame.
    let w = 1e-3;
    let vd = translational_dynamics(
        &Vec3::zeros(),
        &Vec3::new(1.0, 0.0, 0.0),
        &Vec3::zeros(),
        1.0,
        &Vec3::zeros(),
        &Vec3::zeros(),
        &Vec3::new(0.0, 0.0, w),
    );
    errs.push(("coriolis", (vd - Vec3::new(0.0, -2.0 * w, 0.0)).norm()));

    // Mass flow.
    let mdot = mass_flow(&fired(&[0, 1, 2, 3]), &thr, 225.0);
    errs.push(("mass flow", (mdot - (-4.0 / (225.0 * 9.8))).abs()));
    errs.push(("burn propellant", (-mass_flow(&fired(&[10, 11]), &thr, 225.0) * 10.0 - 20.0 / (225.0 * G_REF)).abs()));

    // Asteroid spin: a=300, b=c=150 gives σ = (112500 − 45000)/45000 = 1.5,
    // so ω_n = 1.5·1e-4·cos 60° = 7.5e-5 rad/s.
    let model = AsteroidModel {
        a: 300.0,
        b: 150.0,
        c: 150.0,
        spin_rate: 1e-4,
        nutation: 60f64.to_radians(),
        phase: 0.0,
        ..AsteroidModel::reference()
    };
    errs.push(("sigma", (model.sigma() - 1.5).abs()));
    let s60 = 3f64.sqrt() / 2.0;
    let w0 = asteroid_omega(0.0, &model);
    errs.push(("spin t=0", (w0 - Vec3::new(1e-4 * s60, 0.0, 0.5e-4)).norm()));
    let angle: f64 = 7.5e-5 * 1000.0;
    let w1 = asteroid_omega(1000.0, &model);
    errs.push((
        "spin t=1000",
        (w1 - Vec3::new(1e-4 * s60 * angle.cos(), 1e-4 * s60 * angle.sin(), 0.5e-4)).norm(),
    ));

    // Velocity reference.
    let p = VelocityReferenceParams::default();
    let vr = velocity_reference(300.0, 1.0, &p);
    errs.push(("v_ref t_go=300", (vr.v_ref - 0.5 * (1.0 - (-1f64).exp())).abs() + (vr.v_ref - 0.316_060_279_414_278_6).abs()));
    errs.push(("v_error", (vr.v_error - (vr.v_ref - 1.0)).abs()));
    errs.push(("v_ref t_go=0", velocity_reference(0.0, 1.0, &p).v_ref.abs()));

    // Step reward.
    let r = step_reward(&RewardParams::default(), 0.02, 0.01, 0.0, false, false);
    errs.push(("reward coast", (r - (-0.005)).abs()));
    let r = step_reward(&RewardParams::default(), 0.0, 0.0, 2.0, true, false);
    errs.push(("reward landing", (r - (0.01 - 0.1 + 10.0)).abs()));
    let r = step_reward(&RewardParams::default(), 0.0, 0.0, 0.0, false, true);
    errs.push(("reward violation", (r - (0.01 - 50.0)).abs()));

    let (worst_name, worst) = errs.iter().cloned().fold(("", 0.0), |a, b| if b.1 > a.1 { b } else { a });
    let failed: Vec<&str> = errs.iter().filter(|e| !(e.1 < 1e-9)).map(|e| e.0).collect();
    let ok = line(
        4,
        "equation examples",
        failed.is_empty(),
        &format!(
            "{} examples, worst abs err {worst:.2e} ({worst_name}) (< 1e-9){}",
            errs.len(),
            if failed.is_empty() { String::new() } else { format!(", failed: {}", failed.join(", ")) }
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_5_gradient_verification() {
    let t0 = Instant::now();
    let mut rng = SimRng::seed_from(505);
    let c = check_bptt_gradient(|net, caches, d_out, grad| net.backward_sequence(caches, d_out, grad), &mut rng);
    let secs = t0.elapsed().as_secs_f64();
    let ok = line(
        5,
        "BPTT gradient",
        c.passed && secs < 30.0,
        &format!("max rel err {:.2e} over 100 probes (< 1e-4), runtime {secs:.2} s (< 30 s)", c.measured),
    );
    assert!(ok);
}

#[test]
fn criterion_6_ppo_toy_improvement() {
    let t0 = Instant::now();
    let cfg = PpoConfig::default();
    let mut trainer = Trainer::new(cfg.clone(), 2, 1, 1).unwrap();
    let batch_seeds = |u: u64| -> Vec<u64> { (0..cfg.episodes_per_batch as u64).map(|k| u * 1000 + k).collect() };

    // Baseline: the untrained stochastic policy.
    let baseline = (0..5)
        .map(|u| {
            collect_rollouts(DoubleIntegrator::default, &trainer.policy, &trainer.value, &batch_seeds(10_000 + u), false)
                .unwrap()
                .mean_episode_reward()
        })
        .sum::<f64>()
        / 5.0;

    let mut curve = Vec::new();
    for u in 0..200 {
        let batch =
            collect_rollouts(DoubleIntegrator::default, &trainer.policy, &trainer.value, &batch_seeds(u), false).unwrap();
        curve.push(trainer.update(&batch).mean_reward);
    }
    let blocks: Vec<f64> = curve.chunks(40).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
    let monotone = blocks.windows(2).all(|w| w[1] > w[0]);
    let last = *blocks.last().unwrap();
    let ratio = last / baseline;
    let secs = t0.elapsed().as_secs_f64();
    let ok = line(
        6,
        "PPO toy improvement",
        monotone && ratio >= 5.0 && secs < 600.0,
        &format!(
            "40-update block means {:?} (strictly increasing: {monotone}), final/baseline = {last:.2}/{baseline:.2} = {ratio:.2} (>= 5), runtime {secs:.1} s",
            blocks.iter().map(|b| (b * 100.0).round() / 100.0).collect::<Vec<_>>()
        ),
    );
    assert!(ok);
}

/// Extended run: set `ASTEROID_GNC_DESK_CHECKPOINT` to evaluate an existing
/// checkpoint from `train --config configs/desk_scale.toml` instead of
/// training here.
#[test]
#[ignore = "extended: trains for about half an hour"]
fn criterion_7_desk_scale_landing() {
    let root = env!("CARGO_MANIFEST_DIR");
    let cfg = RunConfig::load(&std::path::Path::new(root).join("../../configs/desk_scale.toml")).unwrap();
    assert!(cfg.train.updates <= 500);
    let ck = match std::env::var_os("ASTEROID_GNC_DESK_CHECKPOINT") {
        Some(p) => Checkpoint::load(std::path::Path::new(&p)).unwrap(),
        None => {
            let dir = tempfile::tempdir().unwrap();
            let summary = run_train(&cfg, None, dir.path(), |s| {
                if s.update % 10 == 0 {
                    println!("update {} reward {:.2} good {:.1}%", s.update, s.mean_reward, 100.0 * s.good_fraction);
                }
            })
            .unwrap();
            Checkpoint::load(&summary.latest_checkpoint).unwrap()
        }
    };
    let report = run_eval(&cfg, &ck.trainer.policy, 500).unwrap();
    let a = report.aggregate.clone().unwrap();
    let ok = line(
        7,
        "desk-scale landing",
        a.good_landing_pct >= 90.0,
        &format!(
            "good landings {:.1}% of 500 at miss <= 5 m, speed <= 0.2 m/s, |w| <= 0.05 rad/s (>= 90%) after {} updates; mean miss {:.2} m, mean speed {:.3} m/s",
            a.good_landing_pct, ck.update, a.miss.mean, a.speed.mean
        ),
    );
    assert!(ok);
}

#[test]
fn criterion_8_constraint_enforcement() {
    let cfg = EpisodeConfig::default();
    let kappa = cfg.reward.kappa;
    let mut env = LandingEnv::new(cfg.clone()).unwrap();
    let mut rng = SimRng::seed_from(808);
    let (mut enforced, mut total) = (0usize, 0usize);
    for ep in 0..1000u64 {
        env.reset(ep).unwrap();
        // Fly a few random steps first so injections land mid-episode.
        let warmup = rng.index(6);
        let mut alive = true;
        for _ in 0..warmup {
            let u: Vec<f64> = (0..NUM_THRUSTERS).map(|_| rng.uniform(-1.0, 1.0)).collect();
            if env.step(&discretize_action(&u)).unwrap().done {
                alive = false;
                break;
            }
        }
        if !alive {
            env.reset(ep).unwrap();
        }
        let rate = ep % 2 == 0;
        let expected = if rate {
            let k = rng.index(3);
            let sign = if rng.chance(0.5) { 1.0 } else { -1.0 };
            env.state_mut().omega[k] = sign * rng.uniform(0.1001, 0.5);
            ViolationKind::RotationRate
        } else {
            // Tilt the latched seeker frame so the target sits beyond 45°.
            let axis = if rng.chance(0.5) { Vec3::x() } else { Vec3::y() };
            let sign = if rng.chance(0.5) { 1.0 } else { -1.0 };
            let tilt = Quaternion::from_axis_angle(&axis, sign * rng.uniform(55.0, 85.0).to_radians());
            let q0 = env.latched_attitude() * tilt;
            env.set_latched_attitude(q0);
            ViolationKind::LockLost
        };
        let s = env.step(&[false; NUM_THRUSTERS]).unwrap();
        total += 1;
        // Shaping terms other than η are non-positive, so κ shows up as a
        // reward no greater than κ + η.
        if s.done && s.info.outcome == Some(Outcome::Violation(expected)) && s.reward <= kappa + cfg.reward.eta {
            enforced += 1;
        }
    }
    let pct = 100.0 * enforced as f64 / total as f64;
    let ok = line(
        8,
        "constraint enforcement",
        enforced == total,
        &format!("{enforced}/{total} injected violations terminated that step with kappa ({pct:.1}%, required 100%)"),
    );
    assert!(ok);
}

#[test]
fn criterion_9_eval_determinism() {
    let cfg = RunConfig::from_toml_str("seed = 99").unwrap();
    let ck = initial_checkpoint(&cfg).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ck.json");
    ck.save(&path).unwrap();
    let mut outputs = Vec::new();
    for run in 0..2 {
        let ck = Checkpoint::load(&path).unwrap();
        let report = run_eval(&cfg, &ck.trainer.policy, 64).unwrap();
        let out = dir.path().join(format!("run{run}"));
        report.write_to(&out, true).unwrap();
        let files = ["eval_report.json", "eval_episodes.csv", "eval_summary.csv", "eval_miss_speed.svg"];
        outputs.push(files.map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    let identical = outputs[0] == outputs[1];
    let bytes: usize = outputs[0].iter().map(|f| f.len()).sum();
    let ok = line(
        9,
        "eval determinism",
        identical,
        &format!("two 64-episode eval runs, 4 report files, {bytes} bytes, byte-identical: {identical}"),
    );
    assert!(ok);
}

//! Body-frame force and torque produced by each thruster of the reference
//! cube, with the centre of mass at the origin and offset.

use asteroid_gnc::math::Vec3;
use asteroid_gnc::spacecraft::{body_force_torque, ThrusterCommand, ThrusterConfig, NUM_THRUSTERS};

fn main() {
    let cfg = ThrusterConfig::scaled(1.0, 2.0);
    for com in [Vec3::zeros(), Vec3::new(0.1, -0.05, 0.0)] {
        println!("centre of mass [{:+.2} {:+.2} {:+.2}] m", com.x, com.y, com.z);
        for i in 0..NUM_THRUSTERS {
            let mut cmd: ThrusterCommand = [false; NUM_THRUSTERS];
            cmd[i] = true;
            let (f, l) = body_force_torque(&cmd, &cfg, &com);
            let p = cfg.positions[i];
            println!(
                "  T{:<2} at [{:+.1} {:+.1} {:+.1}]  F [{:+.2} {:+.2} {:+.2}] N  L [{:+.3} {:+.3} {:+.3}] N m",
                i + 1, p.x, p.y, p.z, f.x, f.y, f.z, l.x, l.y, l.z
            );
        }
    }
    let (f, l) = body_force_torque(&[true; NUM_THRUSTERS], &cfg, &Vec3::zeros());
    println!("all on: |F| {:.2e} N  |L| {:.2e} N m", f.norm(), l.norm());
}

//! Seeker angles for a target swept across the field of regard, then the
//! same geometry seen through a biased, noisy sensor.

use asteroid_gnc::math::{Quaternion, SimRng, Vec3};
use asteroid_gnc::seeker::{in_field_of_regard, measure, seeker_angles, SeekerTruth, SensorBias, SensorRanges};

fn main() -> asteroid_gnc::Result<()> {
    let q0 = Quaternion::default();
    println!("{:>8} {:>10} {:>10} {:>6}", "off (deg)", "theta_u", "theta_v", "lock");
    for deg in [0.0_f64, 10.0, 30.0, 60.0, 80.0, 85.0] {
        // The seeker looks along body -z.
        let a = deg.to_radians();
        let r_tm = Vec3::new(a.sin() * 0.6, a.sin() * 0.8, -a.cos()) * 1000.0;
        let (u, v) = seeker_angles(&r_tm, &q0)?;
        println!("{deg:>8.1} {u:>10.4} {v:>10.4} {:>6}", in_field_of_regard(&r_tm, &q0));
    }

    let mut rng = SimRng::seed_from(11);
    let bias = SensorBias::sample(&mut rng, &SensorRanges::default());
    println!("sampled bias: range {:+.4} angle {:+.4} noise sd {:.2e}", bias.range, bias.angle, bias.angle_noise_sd);
    let truth = SeekerTruth {
        r_tm: Vec3::new(120.0, -80.0, -900.0),
        q: Quaternion::from_axis_angle(&Vec3::x(), 0.02),
        q0,
        omega: Vec3::new(1e-3, -2e-3, 5e-4),
    };
    let (u, v) = seeker_angles(&truth.r_tm, &truth.q0)?;
    println!("truth: range {:.2} theta_u {:.5} theta_v {:.5}", truth.r_tm.norm(), u, v);
    for _ in 0..3 {
        match measure(&truth, &bias, &mut rng) {
            Ok(m) => println!("measured: range {:.2} theta_u {:.5} theta_v {:.5}", m.range, m.theta_u, m.theta_v),
            Err(e) => println!("lock lost at ({:.3}, {:.3})", e.theta_u, e.theta_v),
        }
    }
    Ok(())
}

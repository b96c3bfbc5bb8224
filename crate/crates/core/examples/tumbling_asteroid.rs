//! Propagate the nutating spin of a sampled asteroid and print its body
//! rate and attitude over one spin period.

use asteroid_gnc::asteroid::{asteroid_omega, propagate_asteroid_attitude, sample_asteroid, AsteroidAttitude, AsteroidRanges};
use asteroid_gnc::math::SimRng;

fn main() -> asteroid_gnc::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(3);
    let mut rng = SimRng::seed_from(seed);
    let model = sample_asteroid(&mut rng, &AsteroidRanges::default());
    println!(
        "a {:.1} b {:.1} c {:.1} m  spin {:.3e} rad/s  nutation {:.1} deg  nutation rate {:.3e} rad/s",
        model.a,
        model.b,
        model.c,
        model.spin_rate,
        model.nutation.to_degrees(),
        model.nutation_rate()
    );
    let period = std::f64::consts::TAU / model.spin_rate;
    let dt = 2.0;
    let steps = (period / dt).ceil() as usize;
    let mut att = AsteroidAttitude::default();
    for k in 0..=steps {
        if k % (steps / 8).max(1) == 0 {
            let w = asteroid_omega(att.t, &model);
            let q = att.q.to_array();
            println!(
                "t {:8.0} s  omega [{:+.3e} {:+.3e} {:+.3e}]  q [{:+.4} {:+.4} {:+.4} {:+.4}]",
                att.t, w.x, w.y, w.z, q[0], q[1], q[2], q[3]
            );
        }
        att = propagate_asteroid_attitude(&att, &model, dt)?;
    }
    println!("quaternion norm after {} steps: {:.15}", steps + 1, att.q.norm());
    Ok(())
}

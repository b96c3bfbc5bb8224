//! Reset a few landing episodes and show the state after the initial
//! open-loop burn, along with the first observation the policy sees.

use asteroid_gnc::env::{EpisodeConfig, LandingEnv};

fn main() -> asteroid_gnc::Result<()> {
    let mut env = LandingEnv::new(EpisodeConfig::default())?;
    for seed in 0..5 {
        let obs = env.reset(seed)?;
        let s = env.state();
        println!(
            "seed {seed}: t {:.0} s  |r| {:.1} m  |v| {:.3} m/s  |w| {:.2e} rad/s  fuel {:.4} kg",
            env.time(),
            s.r.norm(),
            s.v.norm(),
            s.omega.norm(),
            env.fuel_used()
        );
        println!(
            "        obs: theta ({:+.4}, {:+.4})  rates ({:+.2e}, {:+.2e})  v_error {:+.4}  t_go {:.1}",
            obs.theta_u, obs.theta_v, obs.theta_u_rate, obs.theta_v_rate, obs.v_error, obs.t_go
        );
    }
    Ok(())
}

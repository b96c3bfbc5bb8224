//! Fly one landing episode with an untrained stochastic policy and report
//! how it ended.

use asteroid_gnc::env::{EpisodeConfig, LandingEnv};
use asteroid_gnc::ppo::{run_episode, Environment};
use asteroid_gnc::neural::{GaussianPolicy, ValueFunction};
use asteroid_gnc::math::SimRng;

fn main() -> asteroid_gnc::Result<()> {
    let seed: u64 = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let mut env = LandingEnv::new(EpisodeConfig::default())?;
    let mut rng = SimRng::seed_from(seed);
    let policy = GaussianPolicy::new(env.obs_dim(), env.act_dim(), 0.5, &mut rng);
    let value = ValueFunction::new(env.obs_dim(), &mut rng);
    let t0 = std::time::Instant::now();
    let ep = run_episode(&mut env, &policy, &value, seed, false)?;
    let term = ep.terminal.clone().expect("episode ended");
    println!(
        "steps {}  reward {:.2}  outcome {}  miss {:.1} m  speed {:.3} m/s  fuel {:.3} kg  ({:.2?})",
        ep.len(),
        ep.total_reward(),
        term.outcome,
        term.miss,
        term.speed,
        term.fuel,
        t0.elapsed()
    );
    Ok(())
}

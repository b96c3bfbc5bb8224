//! Train a recurrent policy on the 1-D double integrator and print the
//! learning curve.
//!
//! Usage: `cargo run --release --example toy_ppo [updates] [seed]`

use asteroid_gnc::ppo::{collect_rollouts, DoubleIntegrator, PpoConfig, Trainer};

fn main() -> asteroid_gnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let updates: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(200);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(1);
    let cfg = PpoConfig::default();
    let mut trainer = Trainer::new(cfg.clone(), 2, 1, seed)?;
    let mut curve = Vec::new();
    for u in 0..updates {
        let seeds: Vec<u64> = (0..cfg.episodes_per_batch as u64).map(|k| u * 1000 + k).collect();
        let batch = collect_rollouts(DoubleIntegrator::default, &trainer.policy, &trainer.value, &seeds, false)?;
        let s = trainer.update(&batch);
        curve.push(s.mean_reward);
        if s.update % 10 == 0 || s.update == 1 {
            println!(
                "update {:4}  reward {:7.3}  kl {:.5}  clip {:.4}  std {:.3}",
                s.update,
                s.mean_reward,
                s.kl,
                s.clip,
                s.log_std_mean.exp()
            );
        }
    }
    let blocks: Vec<String> = curve
        .chunks(40)
        .map(|c| format!("{:.2}", c.iter().sum::<f64>() / c.len() as f64))
        .collect();
    println!("40-update block means: {}", blocks.join(", "));
    Ok(())
}

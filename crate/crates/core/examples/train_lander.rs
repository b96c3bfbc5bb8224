//! Short PPO training run on the landing task.
//!
//! Usage: `cargo run --release --example train_lander [config] [updates] [out_dir]`

use std::path::PathBuf;

use asteroid_gnc::harness::{run_train, RunConfig, Variant};

fn main() -> asteroid_gnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let mut cfg = match args.next() {
        Some(p) => RunConfig::load(&PathBuf::from(p))?,
        None => RunConfig::defaults(Variant::Spacecraft),
    };
    cfg.train.updates = args.next().and_then(|a| a.parse().ok()).unwrap_or(10);
    cfg.train.plots = true;
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/example_train"));
    let summary = run_train(&cfg, None, &out, |s| {
        println!(
            "update {:3}  reward {:8.2}  good {:5.1}%  miss {:7.1} m  kl {:.2e}",
            s.update,
            s.mean_reward,
            100.0 * s.good_fraction,
            s.mean_miss,
            s.kl
        );
    })?;
    println!("checkpoint: {}", summary.latest_checkpoint.display());
    Ok(())
}

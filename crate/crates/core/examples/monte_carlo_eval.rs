//! Monte Carlo evaluation of a checkpoint, or of an untrained policy when
//! no checkpoint is given.
//!
//! Usage: `cargo run --release --example monte_carlo_eval [episodes] [checkpoint]`

use std::path::PathBuf;

use asteroid_gnc::harness::{initial_checkpoint, run_eval, Checkpoint, RunConfig, Variant};

fn main() -> asteroid_gnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().and_then(|a| a.parse().ok()).unwrap_or(50);
    let cfg = RunConfig::defaults(Variant::Spacecraft);
    let ck = match args.next() {
        Some(p) => Checkpoint::load(&PathBuf::from(p))?,
        None => initial_checkpoint(&cfg)?,
    };
    let report = run_eval(&cfg, &ck.trainer.policy, n)?;
    for row in report.episodes.iter().take(10) {
        println!(
            "episode {:3} seed {:3}  {:<10} miss {:8.2} m  speed {:.3} m/s  fuel {:.3} kg",
            row.episode, row.seed, row.outcome, row.miss, row.speed, row.fuel
        );
    }
    if let Some(a) = &report.aggregate {
        println!("miss   mean {:.2} std {:.2} max {:.2} m", a.miss.mean, a.miss.std, a.miss.max);
        println!("speed  mean {:.3} std {:.3} max {:.3} m/s", a.speed.mean, a.speed.std, a.speed.max);
        println!("good landings {:.1}% of {n}", a.good_landing_pct);
    }
    Ok(())
}

//! Fly one episode with the mean action of an untrained policy and write
//! the trajectory as CSV, JSON and SVG.
//!
//! Usage: `cargo run --release --example simulate_trajectory [seed] [out_dir]`

use std::path::PathBuf;

use asteroid_gnc::harness::{initial_checkpoint, run_simulate, RunConfig, Variant};

fn main() -> asteroid_gnc::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|a| a.parse().ok()).unwrap_or(4);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| PathBuf::from("out/example_simulate"));
    let cfg = RunConfig::defaults(Variant::Spacecraft);
    let ck = initial_checkpoint(&cfg)?;
    let sim = run_simulate(&cfg, &ck.trainer.policy, seed)?;
    sim.write_to(&out, true)?;
    let s = &sim.summary;
    println!(
        "{} after {} steps: miss {:.2} m  speed {:.3} m/s  max |w| {:.3} rad/s  fuel {:.3} kg  reward {:.2}",
        s.outcome, s.steps, s.miss, s.speed, s.max_omega, s.fuel, s.total_reward
    );
    println!("wrote {} records to {}", sim.trajectory.records.len(), out.display());
    Ok(())
}

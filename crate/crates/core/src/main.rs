use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use asteroid_gnc::harness::{
    run_eval, run_simulate, run_train, run_validate, Checkpoint, RunConfig, OUTPUT_DIR_ENV,
};
use asteroid_gnc::Error;

/// Asteroid landing guidance: train, evaluate, replay and validate.
///
/// Exit codes: 0 success, 1 runtime failure, 2 configuration error,
/// 3 checkpoint error, 4 validation failure.
#[derive(Parser)]
#[command(name = "asteroid-gnc", version)]
struct Cli {
    /// Output directory. Overrides `output_dir` from the config file.
    #[arg(long, global = true, env = OUTPUT_DIR_ENV, value_name = "DIR")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train the recurrent policy with PPO, writing checkpoints and a
    /// per-update training log.
    Train {
        /// TOML run configuration.
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        /// Continue from this checkpoint instead of starting fresh.
        #[arg(long, value_name = "CHECKPOINT")]
        resume: Option<PathBuf>,
        /// Suppress per-update progress lines.
        #[arg(long)]
        quiet: bool,
    },
    /// Monte Carlo evaluation of a checkpoint with the mean action.
    Eval {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "CHECKPOINT")]
        checkpoint: PathBuf,
        /// Number of episodes (defaults to `eval.episodes` in the config).
        #[arg(long, value_name = "N")]
        episodes: Option<usize>,
    },
    /// Fly one evaluation episode and write its full trajectory.
    Simulate {
        #[arg(long, value_name = "FILE")]
        config: PathBuf,
        #[arg(long, value_name = "CHECKPOINT")]
        checkpoint: PathBuf,
        /// Episode seed.
        #[arg(long, value_name = "S")]
        seed: u64,
    },
    /// Run the oracle suite (gravity, rotating-frame physics, seeker
    /// geometry, BPTT gradients, integrator order).
    Validate {
        /// Also reset and step episodes built from this configuration.
        #[arg(long, value_name = "FILE")]
        config: Option<PathBuf>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) => 2,
        Error::Checkpoint { .. } => 3,
        _ => 1,
    }
}

fn out_dir(cli_out: &Option<PathBuf>, cfg: &RunConfig) -> PathBuf {
    cli_out.clone().unwrap_or_else(|| cfg.output_dir.clone())
}

fn run(cli: Cli) -> asteroid_gnc::Result<u8> {
    match cli.command {
        Command::Train { config, resume, quiet } => {
            let cfg = RunConfig::load(&config)?;
            let dir = out_dir(&cli.out, &cfg);
            let summary = run_train(&cfg, resume.as_deref(), &dir, |s| {
                if !quiet {
                    println!(
                        "update {:>5}  reward {:>9.3}  good {:>5.1}%  miss {:>8.2} m  kl {:.2e}  clip {:.3}",
                        s.update,
                        s.mean_reward,
                        100.0 * s.good_fraction,
                        s.mean_miss,
                        s.kl,
                        s.clip
                    );
                }
            })?;
            println!(
                "ran {} updates ({} total); latest checkpoint {}",
                summary.updates_run,
                summary.total_updates,
                summary.latest_checkpoint.display()
            );
            Ok(0)
        }
        Command::Eval {
            config,
            checkpoint,
            episodes,
        } => {
            let cfg = RunConfig::load(&config)?;
            let ck = Checkpoint::load(&checkpoint)?;
            let n = episodes.unwrap_or(cfg.eval.episodes);
            let report = run_eval(&cfg, &ck.trainer.policy, n)?;
            let dir = out_dir(&cli.out, &cfg);
            report.write_to(&dir, cfg.eval.plots)?;
            match &report.aggregate {
                Some(a) => {
                    println!("{:<12} {:>12} {:>12} {:>12}", "", "mean", "std", "max");
                    for (name, s) in [
                        ("miss (m)", a.miss),
                        ("speed (m/s)", a.speed),
                        ("|w| (rad/s)", a.max_omega),
                        ("fuel (kg)", a.fuel),
                    ] {
                        println!("{name:<12} {:>12.4} {:>12.4} {:>12.4}", s.mean, s.std, s.max);
                    }
                    println!("good landings: {:.2}% of {n}", a.good_landing_pct);
                }
                None => println!("no episodes evaluated"),
            }
            println!("wrote {}", dir.display());
            Ok(0)
        }
        Command::Simulate {
            config,
            checkpoint,
            seed,
        } => {
            let cfg = RunConfig::load(&config)?;
            let ck = Checkpoint::load(&checkpoint)?;
            let sim = run_simulate(&cfg, &ck.trainer.policy, seed)?;
            let dir = out_dir(&cli.out, &cfg);
            sim.write_to(&dir, cfg.eval.plots)?;
            let s = &sim.summary;
            println!(
                "seed {seed}: {} after {} steps, miss {:.3} m, speed {:.3} m/s, fuel {:.3} kg",
                s.outcome, s.steps, s.miss, s.speed, s.fuel
            );
            println!("wrote {}", dir.join(format!("trajectory_{seed}.csv")).display());
            Ok(0)
        }
        Command::Validate { config } => {
            let cfg = config.as_deref().map(RunConfig::load).transpose()?;
            let report = run_validate(cfg.as_ref());
            for line in report.lines() {
                println!("{line}");
            }
            if let Some(dir) = cli.out.as_deref().or(cfg.as_ref().map(|c| c.output_dir.as_path())) {
                write_validation(dir, &report)?;
            }
            if report.all_passed() {
                println!("all {} checks passed", report.checks.len());
                Ok(0)
            } else {
                let names: Vec<&str> = report.failed().iter().map(|c| c.name.as_str()).collect();
                eprintln!("failed checks: {}", names.join(", "));
                Ok(4)
            }
        }
    }
}

fn write_validation(dir: &Path, report: &asteroid_gnc::harness::ValidationReport) -> asteroid_gnc::Result<()> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(report).map_err(|e| Error::InvalidInput(e.to_string()))?;
    std::fs::write(dir.join("validation.json"), json)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

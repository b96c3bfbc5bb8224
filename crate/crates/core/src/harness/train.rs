use std::fs;
use std::path::{Path, PathBuf};

use super::plot::{line_chart, Series};
use super::{Checkpoint, RunConfig};
use crate::env::LandingEnv;
use crate::math::SimRng;
use crate::ppo::{collect_rollouts, Trainer, UpdateStats};
use crate::seeker::OBS_DIM;
use crate::spacecraft::NUM_THRUSTERS;
use crate::Result;

pub const TRAINING_LOG: &str = "training_log.csv";
pub const LATEST_CHECKPOINT: &str = "checkpoint_latest.json";

pub fn checkpoint_name(update: u64) -> String {
    format!("checkpoint_{update:05}.json")
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainSummary {
    /// Updates run by this call.
    pub updates_run: u64,
    /// Updates completed in total, including resumed ones.
    pub total_updates: u64,
    pub latest_checkpoint: PathBuf,
    /// Stats of the updates run by this call.
    pub history: Vec<UpdateStats>,
}

/// Fresh training state: network initialization and the episode-seed stream
/// both follow from the run seed.
pub fn initial_checkpoint(cfg: &RunConfig) -> Result<Checkpoint> {
    let mut root = SimRng::seed_from(cfg.seed);
    let trainer_seed = root.next_u64();
    let run_rng = root.fork();
    let trainer = Trainer::new(cfg.ppo.clone(), OBS_DIM, NUM_THRUSTERS, trainer_seed)?;
    Ok(Checkpoint::new(trainer, run_rng.state()))
}

fn read_log(path: &Path, keep_through: u64) -> Result<Vec<UpdateStats>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let mut rd = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for row in rd.deserialize() {
        let row: UpdateStats = row?;
        if row.update <= keep_through {
            rows.push(row);
        }
    }
    Ok(rows)
}

fn write_log(path: &Path, rows: &[UpdateStats]) -> Result<()> {
    if rows.is_empty() {
        if path.exists() {
            fs::remove_file(path)?;
        }
        return Ok(());
    }
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn append_log(path: &Path, row: &UpdateStats) -> Result<()> {
    let fresh = !path.exists();
    let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    w.serialize(row)?;
    w.flush()?;
    Ok(())
}

/// Learning curve (mean batch reward per update) as SVG.
pub fn learning_curve_svg(rows: &[UpdateStats]) -> String {
    let mean: Vec<(f64, f64)> = rows.iter().map(|r| (r.update as f64, r.mean_reward)).collect();
    let min: Vec<(f64, f64)> = rows.iter().map(|r| (r.update as f64, r.min_reward)).collect();
    line_chart(
        "Episode reward per batch",
        "update",
        "reward",
        &[
            Series {
                label: "mean",
                points: &mean,
            },
            Series {
                label: "min",
                points: &min,
            },
        ],
    )
}

/// Train from scratch, or continue from `resume`, until `cfg.train.updates`
/// batch updates are complete. Each update's seeds come from the
/// checkpointed run stream, so stopping and resuming reproduces an
/// uninterrupted run exactly. `on_update` sees every new row of the log.
pub fn run_train<F>(cfg: &RunConfig, resume: Option<&Path>, out_dir: &Path, mut on_update: F) -> Result<TrainSummary>
where
    F: FnMut(&UpdateStats),
{
    cfg.validate()?;
    fs::create_dir_all(out_dir)?;
    let ckpt_dir = out_dir.join("checkpoints");
    fs::create_dir_all(&ckpt_dir)?;
    let log_path = out_dir.join(TRAINING_LOG);
    let latest = out_dir.join(LATEST_CHECKPOINT);

    let mut ck = match resume {
        Some(p) => Checkpoint::load(p)?,
        None => initial_checkpoint(cfg)?,
    };
    let mut log = read_log(&log_path, if resume.is_some() { ck.update } else { 0 })?;
    write_log(&log_path, &log)?;
    if resume.is_none() && cfg.train.checkpoint_every > 0 {
        ck.save(&ckpt_dir.join(checkpoint_name(0)))?;
    }

    let template = LandingEnv::new(cfg.training_env.clone())?;
    let mut run_rng = SimRng::from_state(&ck.run_rng);
    let mut trainer = ck.trainer;
    let start = trainer.opt.updates;
    let mut history = Vec::new();
    while trainer.opt.updates < cfg.train.updates {
        let seeds: Vec<u64> = (0..trainer.cfg.episodes_per_batch).map(|_| run_rng.next_u64()).collect();
        let batch = collect_rollouts(|| template.clone(), &trainer.policy, &trainer.value, &seeds, false)?;
        let stats = trainer.update(&batch);
        append_log(&log_path, &stats)?;
        on_update(&stats);
        log.push(stats.clone());
        history.push(stats);

        let n = trainer.opt.updates;
        let periodic = cfg.train.checkpoint_every > 0 && n % cfg.train.checkpoint_every == 0;
        if periodic || n == cfg.train.updates {
            let snap = Checkpoint::new(trainer.clone(), run_rng.state());
            if periodic {
                snap.save(&ckpt_dir.join(checkpoint_name(n)))?;
            }
            snap.save(&latest)?;
        }
    }
    ck = Checkpoint::new(trainer, run_rng.state());
    ck.save(&latest)?;
    if cfg.train.plots {
        fs::write(out_dir.join("learning_curve.svg"), learning_curve_svg(&log))?;
    }
    Ok(TrainSummary {
        updates_run: ck.update - start,
        total_updates: ck.update,
        latest_checkpoint: latest,
        history,
    })
}

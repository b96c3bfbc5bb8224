use std::fs;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::plot::{line_chart, Series};
use super::RunConfig;
use crate::env::LandingEnv;
use crate::neural::GaussianPolicy;
use crate::ppo::{Environment, MAX_EPISODE_STEPS};
use crate::{Error, Result};

/// One evaluation episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalRow {
    pub episode: usize,
    pub seed: u64,
    /// Terminal miss distance, m.
    pub miss: f64,
    /// Terminal speed, m/s.
    pub speed: f64,
    /// Largest terminal body-rate component, rad/s.
    pub max_omega: f64,
    /// Propellant used, kg.
    pub fuel: f64,
    pub good: bool,
    pub outcome: String,
    pub steps: usize,
    pub reward: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stat {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub max: f64,
}

impl Stat {
    pub fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
        let max = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some(Self {
            mean,
            std: var.sqrt(),
            max,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalAggregate {
    pub miss: Stat,
    pub speed: Stat,
    pub max_omega: Stat,
    pub fuel: Stat,
    pub good_landing_pct: f64,
}

impl EvalAggregate {
    /// `None` for an empty set of rows.
    pub fn from_rows(rows: &[EvalRow]) -> Option<Self> {
        let col = |f: fn(&EvalRow) -> f64| rows.iter().map(f).collect::<Vec<_>>();
        Some(Self {
            miss: Stat::of(&col(|r| r.miss))?,
            speed: Stat::of(&col(|r| r.speed))?,
            max_omega: Stat::of(&col(|r| r.max_omega))?,
            fuel: Stat::of(&col(|r| r.fuel))?,
            good_landing_pct: 100.0 * rows.iter().filter(|r| r.good).count() as f64 / rows.len() as f64,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub seed: u64,
    pub episodes: Vec<EvalRow>,
    pub aggregate: Option<EvalAggregate>,
}

impl EvalReport {
    pub fn from_rows(seed: u64, episodes: Vec<EvalRow>) -> Self {
        let aggregate = EvalAggregate::from_rows(&episodes);
        Self {
            seed,
            episodes,
            aggregate,
        }
    }

    pub fn len(&self) -> usize {
        self.episodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.episodes.is_empty()
    }

    /// Per-episode rows as CSV.
    pub fn write_episodes_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        if self.episodes.is_empty() {
            out.write_record([
                "episode", "seed", "miss", "speed", "max_omega", "fuel", "good", "outcome", "steps",
                "reward",
            ])?;
        }
        for r in &self.episodes {
            out.serialize(r)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Performance table: one row per quantity with mean, std and max.
    pub fn write_summary_csv<W: std::io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(["quantity", "mean", "std", "max"])?;
        if let Some(a) = &self.aggregate {
            for (name, s) in [
                ("miss_m", a.miss),
                ("speed_m_s", a.speed),
                ("max_omega_rad_s", a.max_omega),
                ("fuel_kg", a.fuel),
            ] {
                out.write_record([name.to_string(), s.mean.to_string(), s.std.to_string(), s.max.to_string()])?;
            }
            out.write_record([
                "good_landing_pct".to_string(),
                a.good_landing_pct.to_string(),
                String::new(),
                String::new(),
            ])?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::InvalidInput(e.to_string()))
    }

    /// Writes `eval_report.json`, `eval_episodes.csv` and `eval_summary.csv`
    /// and, with `plots`, `eval_miss_speed.svg`.
    pub fn write_to(&self, dir: &Path, plots: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("eval_report.json"), self.to_json()?)?;
        self.write_episodes_csv(fs::File::create(dir.join("eval_episodes.csv"))?)?;
        self.write_summary_csv(fs::File::create(dir.join("eval_summary.csv"))?)?;
        if plots {
            let miss: Vec<(f64, f64)> = self.episodes.iter().map(|r| (r.episode as f64, r.miss)).collect();
            let speed: Vec<(f64, f64)> = self.episodes.iter().map(|r| (r.episode as f64, r.speed)).collect();
            let svg = line_chart(
                "Terminal miss and speed",
                "episode",
                "m, m/s",
                &[
                    Series {
                        label: "miss (m)",
                        points: &miss,
                    },
                    Series {
                        label: "speed (m/s)",
                        points: &speed,
                    },
                ],
            );
            fs::write(dir.join("eval_miss_speed.svg"), svg)?;
        }
        Ok(())
    }
}

/// Seed of evaluation episode `index`.
pub fn episode_seed(seed: u64, index: usize) -> u64 {
    seed ^ index as u64
}

/// Run one episode with the mean action and no stored rollout.
pub fn evaluate_episode<E: Environment>(env: &mut E, policy: &GaussianPolicy, episode: usize, seed: u64) -> Result<EvalRow> {
    let mut obs = env.reset(seed)?;
    let mut h = policy.initial_hidden();
    let mut reward = 0.0;
    for step in 1..=MAX_EPISODE_STEPS {
        let (mean, h_next) = policy.forward(&obs, &h)?;
        let t = env.step(&mean)?;
        reward += t.reward;
        obs = t.obs;
        h = h_next;
        if t.done {
            let m = t.terminal.ok_or_else(|| {
                Error::Propagation(format!("episode {episode} ended without terminal metrics"))
            })?;
            return Ok(EvalRow {
                episode,
                seed,
                miss: m.miss,
                speed: m.speed,
                max_omega: m.max_omega,
                fuel: m.fuel,
                good: m.good,
                outcome: m.outcome,
                steps: step,
                reward,
            });
        }
    }
    Err(Error::Propagation(format!(
        "evaluation episode {episode} exceeded {MAX_EPISODE_STEPS} steps"
    )))
}

/// Evaluate `n` episodes in parallel; rows come back in episode order.
pub fn evaluate<E, F>(make_env: F, policy: &GaussianPolicy, seed: u64, n: usize) -> Result<EvalReport>
where
    E: Environment,
    F: Fn() -> E + Sync,
{
    let rows = (0..n)
        .into_par_iter()
        .map(|i| evaluate_episode(&mut make_env(), policy, i, episode_seed(seed, i)))
        .collect::<Result<Vec<_>>>()?;
    Ok(EvalReport::from_rows(seed, rows))
}

/// Monte Carlo evaluation on the evaluation episode settings.
pub fn run_eval(cfg: &RunConfig, policy: &GaussianPolicy, n: usize) -> Result<EvalReport> {
    cfg.validate()?;
    let template = LandingEnv::new(cfg.eval_env.clone())?;
    evaluate(|| template.clone(), policy, cfg.seed, n)
}

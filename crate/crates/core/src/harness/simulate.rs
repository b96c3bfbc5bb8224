use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::plot::{line_chart, Series};
use super::RunConfig;
use crate::env::{discretize_action, LandingEnv, Trajectory, TrajectoryRecord};
use crate::neural::GaussianPolicy;
use crate::ppo::MAX_EPISODE_STEPS;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationSummary {
    pub seed: u64,
    pub steps: usize,
    pub outcome: String,
    pub miss: f64,
    pub speed: f64,
    pub max_omega: f64,
    pub fuel: f64,
    pub good: bool,
    pub total_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Simulation {
    pub summary: SimulationSummary,
    pub trajectory: Trajectory,
}

/// Fly one evaluation episode with the mean action, logging every guidance
/// step. Each record holds the state after the step, the command applied
/// during it and the observation produced at its end.
pub fn simulate_episode(env: &mut LandingEnv, policy: &GaussianPolicy, seed: u64) -> Result<Simulation> {
    let scales = env.config().scales;
    let mut obs = env.reset(seed)?.normalized(&scales);
    let mut h = policy.initial_hidden();
    let mut records = Vec::new();
    let mut total = 0.0;
    for _ in 0..MAX_EPISODE_STEPS {
        let (mean, h_next) = policy.forward(&obs, &h)?;
        h = h_next;
        let cmd = discretize_action(&mean);
        let step = env.step(&cmd)?;
        obs = step.observation.normalized(&scales);
        total += step.reward;
        records.push(TrajectoryRecord::new(env.state(), &cmd, &step, obs));
        if let Some(outcome) = step.info.outcome {
            let m = &step.info.metrics;
            let summary = SimulationSummary {
                seed,
                steps: records.len(),
                outcome: outcome.label().to_string(),
                miss: m.miss,
                speed: m.speed,
                max_omega: m.max_omega,
                fuel: step.info.fuel_used,
                good: outcome == crate::env::Outcome::Landed && m.good,
                total_reward: total,
            };
            return Ok(Simulation {
                summary,
                trajectory: Trajectory { records },
            });
        }
    }
    Err(Error::Propagation(format!("simulation with seed {seed} did not terminate")))
}

pub fn run_simulate(cfg: &RunConfig, policy: &GaussianPolicy, seed: u64) -> Result<Simulation> {
    cfg.validate()?;
    let mut env = LandingEnv::new(cfg.eval_env.clone())?;
    simulate_episode(&mut env, policy, seed)
}

impl Simulation {
    /// Writes `trajectory_<seed>.csv`, `trajectory_<seed>.json` (summary) and,
    /// with `plots`, `trajectory_<seed>.svg`.
    pub fn write_to(&self, dir: &Path, plots: bool) -> Result<()> {
        fs::create_dir_all(dir)?;
        let stem = format!("trajectory_{}", self.summary.seed);
        self.trajectory
            .write_csv(fs::File::create(dir.join(format!("{stem}.csv")))?)?;
        let json = serde_json::to_string_pretty(&self.summary).map_err(|e| Error::InvalidInput(e.to_string()))?;
        fs::write(dir.join(format!("{stem}.json")), json)?;
        if plots {
            fs::write(dir.join(format!("{stem}.svg")), self.svg())?;
        }
        Ok(())
    }

    /// Range, Θ_BV and thruster count against time.
    pub fn svg(&self) -> String {
        let recs = &self.trajectory.records;
        let range: Vec<(f64, f64)> = recs.iter().map(|r| (r.t, r.adjusted_range)).collect();
        let theta: Vec<(f64, f64)> = recs.iter().map(|r| (r.t, r.theta_bv.to_degrees())).collect();
        let fired: Vec<(f64, f64)> = recs
            .iter()
            .map(|r| (r.t, r.action.iter().filter(|&&a| a).count() as f64))
            .collect();
        let charts = [
            line_chart("Adjusted range", "t (s)", "m", &[Series { label: "range", points: &range }]),
            line_chart("Theta_BV", "t (s)", "deg", &[Series { label: "theta_bv", points: &theta }]),
            line_chart("Thrusters fired", "t (s)", "count", &[Series { label: "fired", points: &fired }]),
        ];
        // Stack the three charts vertically in one document.
        let mut out = String::from(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"1080\" viewBox=\"0 0 640 1080\">\n",
        );
        for (i, c) in charts.iter().enumerate() {
            out.push_str(&format!("<g transform=\"translate(0 {})\">\n", 360 * i));
            out.push_str(c);
            out.push_str("</g>\n");
        }
        out.push_str("</svg>\n");
        out
    }
}

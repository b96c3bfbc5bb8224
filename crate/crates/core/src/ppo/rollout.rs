use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Environment, TerminalMetrics};
use crate::math::SimRng;
use crate::neural::{sample_action, GaussianPolicy, ValueFunction};
use crate::{Error, Result};

/// Upper bound on steps per episode, guarding against environments that
/// never signal termination.
pub const MAX_EPISODE_STEPS: usize = 100_000;

const ACTION_STREAM: u64 = 0x9E37_79B9_7F4A_7C15;

/// One episode of experience. Hidden states are those fed *into* step `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRollout {
    pub seed: u64,
    pub obs: Vec<Vec<f64>>,
    pub actions: Vec<Vec<f64>>,
    pub logp: Vec<f64>,
    pub rewards: Vec<f64>,
    pub values: Vec<f64>,
    pub policy_hidden: Vec<Vec<f64>>,
    pub value_hidden: Vec<Vec<f64>>,
    pub terminal: Option<TerminalMetrics>,
}

impl EpisodeRollout {
    pub fn len(&self) -> usize {
        self.rewards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rewards.is_empty()
    }

    pub fn total_reward(&self) -> f64 {
        self.rewards.iter().sum()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RolloutBatch {
    pub episodes: Vec<EpisodeRollout>,
}

impl RolloutBatch {
    pub fn steps(&self) -> usize {
        self.episodes.iter().map(|e| e.len()).sum()
    }

    pub fn mean_episode_reward(&self) -> f64 {
        if self.episodes.is_empty() {
            return 0.0;
        }
        self.episodes.iter().map(|e| e.total_reward()).sum::<f64>() / self.episodes.len() as f64
    }
}

/// Run one episode. With `deterministic` the mean action is applied.
pub fn run_episode<E: Environment>(
    env: &mut E,
    policy: &GaussianPolicy,
    value: &ValueFunction,
    seed: u64,
    deterministic: bool,
) -> Result<EpisodeRollout> {
    let mut rng = SimRng::seed_from(seed ^ ACTION_STREAM);
    let mut obs = env.reset(seed)?;
    let mut hp = policy.initial_hidden();
    let mut hv = value.initial_hidden();
    let mut ep = EpisodeRollout {
        seed,
        obs: Vec::new(),
        actions: Vec::new(),
        logp: Vec::new(),
        rewards: Vec::new(),
        values: Vec::new(),
        policy_hidden: Vec::new(),
        value_hidden: Vec::new(),
        terminal: None,
    };
    for _ in 0..MAX_EPISODE_STEPS {
        let (mean, hp_next) = policy.forward(&obs, &hp)?;
        let (v, hv_next) = value.forward(&obs, &hv)?;
        let (action, logp) = if deterministic {
            let lp = crate::neural::gaussian_log_prob(&mean, &mean, &policy.log_std);
            (mean, lp)
        } else {
            sample_action(&mean, &policy.log_std, &mut rng)
        };
        let t = env.step(&action)?;
        ep.obs.push(std::mem::replace(&mut obs, t.obs));
        ep.actions.push(action);
        ep.logp.push(logp);
        ep.rewards.push(t.reward);
        ep.values.push(v);
        ep.policy_hidden.push(std::mem::replace(&mut hp, hp_next));
        ep.value_hidden.push(std::mem::replace(&mut hv, hv_next));
        if t.done {
            ep.terminal = t.terminal;
            return Ok(ep);
        }
    }
    Err(Error::Propagation(format!(
        "episode with seed {seed} exceeded {MAX_EPISODE_STEPS} steps"
    )))
}

/// Collect one episode per seed in parallel. Results are in seed order
/// regardless of completion order.
pub fn collect_rollouts<E, F>(
    make_env: F,
    policy: &GaussianPolicy,
    value: &ValueFunction,
    seeds: &[u64],
    deterministic: bool,
) -> Result<RolloutBatch>
where
    E: Environment,
    F: Fn() -> E + Sync,
{
    let episodes = seeds
        .par_iter()
        .map(|&seed| run_episode(&mut make_env(), policy, value, seed, deterministic))
        .collect::<Result<Vec<_>>>()?;
    Ok(RolloutBatch { episodes })
}

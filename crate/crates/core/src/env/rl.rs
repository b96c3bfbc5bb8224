use super::{discretize_action, LandingEnv, Outcome};
use crate::ppo::{Environment, TerminalMetrics, Transition};
use crate::seeker::OBS_DIM;
use crate::spacecraft::NUM_THRUSTERS;
use crate::Result;

impl Environment for LandingEnv {
    fn obs_dim(&self) -> usize {
        OBS_DIM
    }

    fn act_dim(&self) -> usize {
        NUM_THRUSTERS
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<f64>> {
        let obs = LandingEnv::reset(self, seed)?;
        Ok(obs.normalized(&self.config().scales).to_vec())
    }

    fn step(&mut self, action: &[f64]) -> Result<Transition> {
        let cmd = discretize_action(action);
        let s = LandingEnv::step(self, &cmd)?;
        let terminal = s.info.outcome.map(|o| TerminalMetrics {
            miss: s.info.metrics.miss,
            speed: s.info.metrics.speed,
            max_omega: s.info.metrics.max_omega,
            fuel: s.info.fuel_used,
            good: o == Outcome::Landed && s.info.metrics.good,
            outcome: o.label().to_string(),
        });
        Ok(Transition {
            obs: s.observation.normalized(&self.config().scales).to_vec(),
            reward: s.reward,
            done: s.done,
            terminal,
        })
    }
}

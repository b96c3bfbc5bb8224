use serde::{Deserialize, Serialize};

use crate::math::SimRng;
use crate::Result;

/// Terminal diagnostics reported when an episode ends.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalMetrics {
    pub miss: f64,
    pub speed: f64,
    pub max_omega: f64,
    pub fuel: f64,
    pub good: bool,
    pub outcome: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub obs: Vec<f64>,
    pub reward: f64,
    pub done: bool,
    /// Present on the final transition.
    pub terminal: Option<TerminalMetrics>,
}

/// Episodic environment with continuous actions.
pub trait Environment {
    fn obs_dim(&self) -> usize;
    fn act_dim(&self) -> usize;
    /// Start an episode fully determined by `seed`.
    fn reset(&mut self, seed: u64) -> Result<Vec<f64>>;
    fn step(&mut self, action: &[f64]) -> Result<Transition>;
}

/// 1-D double integrator: drive a unit mass to the origin and hold it there.
///
/// The action is an acceleration command clipped to `[−1, 1]`; the reward is
/// `exp(−(x/width)²)` each step.
#[derive(Debug, Clone, PartialEq)]
pub struct DoubleIntegrator {
    pub dt: f64,
    pub steps: usize,
    pub width: f64,
    pub x_range: f64,
    x: f64,
    v: f64,
    k: usize,
}

impl Default for DoubleIntegrator {
    fn default() -> Self {
        Self {
            dt: 0.2,
            steps: 40,
            width: 0.2,
            x_range: 1.0,
            x: 0.0,
            v: 0.0,
            k: 0,
        }
    }
}

impl DoubleIntegrator {
    fn obs(&self) -> Vec<f64> {
        vec![self.x, self.v]
    }
}

impl Environment for DoubleIntegrator {
    fn obs_dim(&self) -> usize {
        2
    }

    fn act_dim(&self) -> usize {
        1
    }

    fn reset(&mut self, seed: u64) -> Result<Vec<f64>> {
        let mut rng = SimRng::seed_from(seed);
        self.x = rng.uniform(-self.x_range, self.x_range);
        self.v = 0.0;
        self.k = 0;
        Ok(self.obs())
    }

    fn step(&mut self, action: &[f64]) -> Result<Transition> {
        let a = action[0].clamp(-1.0, 1.0);
        self.x += self.v * self.dt + 0.5 * a * self.dt * self.dt;
        self.v += a * self.dt;
        self.k += 1;
        let reward = (-(self.x / self.width).powi(2)).exp();
        let done = self.k >= self.steps;
        Ok(Transition {
            obs: self.obs(),
            reward,
            done,
            terminal: done.then(|| TerminalMetrics {
                miss: self.x.abs(),
                speed: self.v.abs(),
                max_omega: 0.0,
                fuel: 0.0,
                good: self.x.abs() < self.width,
                outcome: "timeout".into(),
            }),
        })
    }
}

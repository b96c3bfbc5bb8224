use serde::{Deserialize, Serialize};

use super::{NetSizes, RecurrentNet};
use crate::math::SimRng;
use crate::Result;

const HALF_LN_2PI: f64 = 0.918_938_533_204_672_7;

/// `Σ [−(uᵢ − μᵢ)²/(2σᵢ²) − log σᵢ − ½ log 2π]`.
pub fn gaussian_log_prob(u: &[f64], mean: &[f64], log_std: &[f64]) -> f64 {
    u.iter()
        .zip(mean)
        .zip(log_std)
        .map(|((u, m), ls)| {
            let z = (u - m) * (-ls).exp();
            -0.5 * z * z - ls - HALF_LN_2PI
        })
        .sum()
}

/// Entropy of a diagonal Gaussian.
pub fn gaussian_entropy(log_std: &[f64]) -> f64 {
    log_std.iter().map(|ls| ls + 0.5 + HALF_LN_2PI).sum()
}

/// Draw `u = μ + σ ⊙ ε` and return it with its log-probability.
pub fn sample_action(mean: &[f64], log_std: &[f64], rng: &mut SimRng) -> (Vec<f64>, f64) {
    let u: Vec<f64> = mean
        .iter()
        .zip(log_std)
        .map(|(m, ls)| m + ls.exp() * rng.standard_normal())
        .collect();
    let logp = gaussian_log_prob(&u, mean, log_std);
    (u, logp)
}

/// Recurrent mean network plus a state-independent log standard deviation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianPolicy {
    pub net: RecurrentNet,
    pub log_std: Vec<f64>,
}

impl GaussianPolicy {
    pub fn new(obs_dim: usize, act_dim: usize, init_std: f64, rng: &mut SimRng) -> Self {
        Self::with_sizes(NetSizes::policy(obs_dim, act_dim), init_std, rng)
    }

    pub fn with_sizes(sizes: NetSizes, init_std: f64, rng: &mut SimRng) -> Self {
        Self {
            net: RecurrentNet::new(sizes, 0.01, rng),
            log_std: vec![init_std.ln(); sizes.output],
        }
    }

    /// Action mean and next hidden state.
    pub fn forward(&self, obs: &[f64], h: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
        self.net.forward(obs, h)
    }

    pub fn initial_hidden(&self) -> Vec<f64> {
        self.net.initial_hidden()
    }
}

/// Recurrent state-value estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueFunction {
    pub net: RecurrentNet,
}

impl ValueFunction {
    pub fn new(obs_dim: usize, rng: &mut SimRng) -> Self {
        Self::with_sizes(NetSizes::value(obs_dim), rng)
    }

    pub fn with_sizes(sizes: NetSizes, rng: &mut SimRng) -> Self {
        Self {
            net: RecurrentNet::new(sizes, 1.0, rng),
        }
    }

    pub fn forward(&self, obs: &[f64], h: &[f64]) -> Result<(f64, Vec<f64>)> {
        let (out, h) = self.net.forward(obs, h)?;
        Ok((out[0], h))
    }

    pub fn initial_hidden(&self) -> Vec<f64> {
        self.net.initial_hidden()
    }
}

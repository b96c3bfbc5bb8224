use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::objective::{clipped_term, clipped_term_grad, discounted_returns, normalize, prob_ratio};
use super::{clip_global_norm, Adam, EpisodeRollout, RolloutBatch};
use crate::math::{RngState, SimRng};
use crate::neural::{gaussian_log_prob, GaussianPolicy, RecurrentNet, StepCache, ValueFunction};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PpoConfig {
    /// Discount rate.
    pub gamma: f64,
    pub lr_policy: f64,
    pub lr_value: f64,
    pub policy_epochs: usize,
    pub value_epochs: usize,
    /// Minibatches per epoch, split by episode.
    pub minibatches: usize,
    /// Truncation length for backpropagation through time.
    pub bptt_len: usize,
    pub clip_init: f64,
    pub clip_min: f64,
    pub clip_max: f64,
    pub kl_target: f64,
    pub grad_clip: f64,
    pub entropy_coef: f64,
    pub normalize_advantages: bool,
    pub episodes_per_batch: usize,
    /// Initial exploration standard deviation.
    pub init_std: f64,
}

impl Default for PpoConfig {
    fn default() -> Self {
        Self {
            gamma: 0.99,
            lr_policy: 2e-4,
            lr_value: 1e-3,
            policy_epochs: 3,
            value_epochs: 10,
            minibatches: 5,
            bptt_len: 64,
            clip_init: 0.2,
            clip_min: 1e-3,
            clip_max: 0.5,
            kl_target: 1e-3,
            grad_clip: 5.0,
            entropy_coef: 0.0,
            normalize_advantages: true,
            episodes_per_batch: 30,
            init_std: 0.5,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad("ppo.gamma must be in (0, 1]");
        }
        if !(self.lr_policy >= 0.0 && self.lr_value >= 0.0) {
            return bad("ppo learning rates must be non-negative");
        }
        if self.minibatches == 0 || self.bptt_len == 0 || self.episodes_per_batch == 0 {
            return bad("ppo.minibatches, bptt_len and episodes_per_batch must be positive");
        }
        if !(0.0 < self.clip_min && self.clip_min <= self.clip_init && self.clip_init <= self.clip_max)
        {
            return bad("ppo clip bounds must satisfy 0 < clip_min ≤ clip_init ≤ clip_max");
        }
        if !(self.kl_target > 0.0 && self.grad_clip > 0.0 && self.init_std > 0.0) {
            return bad("ppo.kl_target, grad_clip and init_std must be positive");
        }
        Ok(())
    }
}

/// Optimizer moments, clip parameter and shuffle stream.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerState {
    pub clip: f64,
    pub policy_adam: Adam,
    pub log_std_adam: Adam,
    pub value_adam: Adam,
    pub updates: u64,
    pub shuffle_rng: RngState,
}

/// Diagnostics of one update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UpdateStats {
    pub update: u64,
    pub episodes: usize,
    pub steps: usize,
    pub mean_reward: f64,
    pub min_reward: f64,
    pub max_reward: f64,
    pub mean_miss: f64,
    pub max_miss: f64,
    pub mean_speed: f64,
    pub max_speed: f64,
    pub good_fraction: f64,
    pub kl: f64,
    pub clip: f64,
    pub surrogate: f64,
    pub value_loss_before: f64,
    pub value_loss_after: f64,
    pub log_std_mean: f64,
    pub policy_epochs_run: usize,
    pub skipped_steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trainer {
    pub cfg: PpoConfig,
    pub policy: GaussianPolicy,
    pub value: ValueFunction,
    pub opt: OptimizerState,
}

/// `(episode, start, end)` spans of at most `len` steps.
fn chunks(batch: &RolloutBatch, episodes: &[usize], len: usize) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &e in episodes {
        let n = batch.episodes[e].len();
        let mut s = 0;
        while s < n {
            let end = (s + len).min(n);
            out.push((e, s, end));
            s = end;
        }
    }
    out
}

fn forward_chunk(net: &RecurrentNet, ep: &EpisodeRollout, hidden: &[Vec<f64>], s: usize, e: usize) -> Vec<StepCache> {
    net.forward_sequence(&ep.obs[s..e], &hidden[s])
}

fn add_into(acc: &mut [f64], x: &[f64]) {
    for (a, b) in acc.iter_mut().zip(x) {
        *a += b;
    }
}

impl Trainer {
    pub fn new(cfg: PpoConfig, obs_dim: usize, act_dim: usize, seed: u64) -> Result<Self> {
        cfg.validate()?;
        let mut rng = SimRng::seed_from(seed);
        let policy = GaussianPolicy::new(obs_dim, act_dim, cfg.init_std, &mut rng);
        let value = ValueFunction::new(obs_dim, &mut rng);
        Ok(Self::from_parts(cfg, policy, value, rng.fork().state()))
    }

    pub fn from_parts(cfg: PpoConfig, policy: GaussianPolicy, value: ValueFunction, shuffle: RngState) -> Self {
        let opt = OptimizerState {
            clip: cfg.clip_init,
            policy_adam: Adam::new(policy.net.params.len(), cfg.lr_policy),
            log_std_adam: Adam::new(policy.log_std.len(), cfg.lr_policy),
            value_adam: Adam::new(value.net.params.len(), cfg.lr_value),
            updates: 0,
            shuffle_rng: shuffle,
        };
        Self {
            cfg,
            policy,
            value,
            opt,
        }
    }

    /// Returns and (optionally normalized) advantages, flattened in episode
    /// order.
    pub fn advantages(&self, batch: &RolloutBatch) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let returns: Vec<Vec<f64>> = batch
            .episodes
            .iter()
            .map(|e| discounted_returns(&e.rewards, self.cfg.gamma))
            .collect();
        let mut flat: Vec<f64> = batch
            .episodes
            .iter()
            .zip(&returns)
            .flat_map(|(e, r)| r.iter().zip(&e.values).map(|(r, v)| r - v))
            .collect();
        if self.cfg.normalize_advantages {
            normalize(&mut flat);
        }
        let mut it = flat.into_iter();
        let adv = batch
            .episodes
            .iter()
            .map(|e| (0..e.len()).map(|_| it.next().unwrap_or(0.0)).collect())
            .collect();
        (returns, adv)
    }

    /// Log-probabilities of the stored actions under the current policy,
    /// evaluated chunkwise from the stored hidden states.
    pub fn current_log_probs(&self, batch: &RolloutBatch) -> Vec<Vec<f64>> {
        let all: Vec<usize> = (0..batch.episodes.len()).collect();
        let spans = chunks(batch, &all, self.cfg.bptt_len);
        let parts: Vec<(usize, Vec<f64>)> = spans
            .par_iter()
            .map(|&(e, s, end)| {
                let ep = &batch.episodes[e];
                let caches = forward_chunk(&self.policy.net, ep, &ep.policy_hidden, s, end);
                let lp = caches
                    .iter()
                    .zip(&ep.actions[s..end])
                    .map(|(c, u)| gaussian_log_prob(u, &c.out, &self.policy.log_std))
                    .collect();
                (e, lp)
            })
            .collect();
        let mut out: Vec<Vec<f64>> = batch.episodes.iter().map(|e| Vec::with_capacity(e.len())).collect();
        for (e, lp) in parts {
            out[e].extend(lp);
        }
        out
    }

    /// Mean of `logp_old − logp_new` over every stored step.
    pub fn kl_estimate(&self, batch: &RolloutBatch) -> f64 {
        let new = self.current_log_probs(batch);
        let n = batch.steps();
        if n == 0 {
            return 0.0;
        }
        batch
            .episodes
            .iter()
            .zip(&new)
            .flat_map(|(e, lp)| e.logp.iter().zip(lp).map(|(o, n)| o - n))
            .sum::<f64>()
            / n as f64
    }

    /// Gradient of the negated clipped surrogate (minus entropy bonus) over
    /// `episodes`, plus the surrogate value.
    pub fn policy_gradient(
        &self,
        batch: &RolloutBatch,
        episodes: &[usize],
        adv: &[Vec<f64>],
    ) -> (Vec<f64>, Vec<f64>, f64) {
        let n_steps: usize = episodes.iter().map(|&e| batch.episodes[e].len()).sum();
        let n = n_steps.max(1) as f64;
        let eps = self.opt.clip;
        let log_std = &self.policy.log_std;
        let var: Vec<f64> = log_std.iter().map(|l| (2.0 * l).exp()).collect();
        let spans = chunks(batch, episodes, self.cfg.bptt_len);
        let parts: Vec<(Vec<f64>, Vec<f64>, f64)> = spans
            .par_iter()
            .map(|&(e, s, end)| {
                let ep = &batch.episodes[e];
                let caches = forward_chunk(&self.policy.net, ep, &ep.policy_hidden, s, end);
                let mut g_ls = vec![0.0; log_std.len()];
                let mut surrogate = 0.0;
                let mut d_out = Vec::with_capacity(caches.len());
                for (k, c) in caches.iter().enumerate() {
                    let t = s + k;
                    let u = &ep.actions[t];
                    let a = adv[e][t];
                    let p = prob_ratio(gaussian_log_prob(u, &c.out, log_std), ep.logp[t]);
                    surrogate += clipped_term(p, a, eps);
                    // d(−J)/d logp
                    let w = -clipped_term_grad(p, a, eps) * p / n;
                    let mut d = vec![0.0; u.len()];
                    for i in 0..u.len() {
                        let diff = u[i] - c.out[i];
                        d[i] = w * diff / var[i];
                        g_ls[i] += w * (diff * diff / var[i] - 1.0);
                    }
                    d_out.push(d);
                }
                let mut g = vec![0.0; self.policy.net.params.len()];
                self.policy.net.backward_sequence(&caches, &d_out, &mut g);
                (g, g_ls, surrogate)
            })
            .collect();
        let mut g_net = vec![0.0; self.policy.net.params.len()];
        let mut g_ls = vec![-self.cfg.entropy_coef; log_std.len()];
        let mut surrogate = 0.0;
        for (g, gl, sur) in parts {
            add_into(&mut g_net, &g);
            add_into(&mut g_ls, &gl);
            surrogate += sur;
        }
        (g_net, g_ls, surrogate / n)
    }

    /// Gradient of the mean squared value error over `episodes`, and the loss.
    pub fn value_gradient(&self, batch: &RolloutBatch, episodes: &[usize], returns: &[Vec<f64>]) -> (Vec<f64>, f64) {
        let n_steps: usize = episodes.iter().map(|&e| batch.episodes[e].len()).sum();
        let n = n_steps.max(1) as f64;
        let spans = chunks(batch, episodes, self.cfg.bptt_len);
        let parts: Vec<(Vec<f64>, f64)> = spans
            .par_iter()
            .map(|&(e, s, end)| {
                let ep = &batch.episodes[e];
                let caches = forward_chunk(&self.value.net, ep, &ep.value_hidden, s, end);
                let mut loss = 0.0;
                let d_out: Vec<Vec<f64>> = caches
                    .iter()
                    .enumerate()
                    .map(|(k, c)| {
                        let err = c.out[0] - returns[e][s + k];
                        loss += err * err;
                        vec![2.0 * err / n]
                    })
                    .collect();
                let mut g = vec![0.0; self.value.net.params.len()];
                self.value.net.backward_sequence(&caches, &d_out, &mut g);
                (g, loss)
            })
            .collect();
        let mut g = vec![0.0; self.value.net.params.len()];
        let mut loss = 0.0;
        for (gi, li) in parts {
            add_into(&mut g, &gi);
            loss += li;
        }
        (g, loss / n)
    }

    /// Mean squared value error over the whole batch.
    pub fn batch_value_loss(&self, batch: &RolloutBatch, returns: &[Vec<f64>]) -> f64 {
        let all: Vec<usize> = (0..batch.episodes.len()).collect();
        self.value_gradient(batch, &all, returns).1
    }

    fn minibatches(&self, rng: &mut SimRng, n: usize) -> Vec<Vec<usize>> {
        let mut idx: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            let j = rng.index(i + 1);
            idx.swap(i, j);
        }
        let m = self.cfg.minibatches.min(n.max(1));
        (0..m)
            .map(|k| idx.iter().skip(k).step_by(m).copied().collect())
            .filter(|v: &Vec<usize>| !v.is_empty())
            .collect()
    }

    /// One PPO update on `batch`.
    pub fn update(&mut self, batch: &RolloutBatch) -> UpdateStats {
        let mut rng = SimRng::from_state(&self.opt.shuffle_rng);
        let (returns, adv) = self.advantages(batch);
        let value_loss_before = self.batch_value_loss(batch, &returns);
        let target = self.cfg.kl_target;
        let mut skipped = 0;
        let mut kl = 0.0;
        let mut surrogate = 0.0;
        let mut epochs_run = 0;
        let mut adjusted = false;

        for epoch in 0..self.cfg.policy_epochs {
            for mb in self.minibatches(&mut rng, batch.episodes.len()) {
                let (mut g_net, mut g_ls, sur) = self.policy_gradient(batch, &mb, &adv);
                if epoch == 0 {
                    surrogate += sur * mb.iter().map(|&e| batch.episodes[e].len()).sum::<usize>() as f64;
                }
                let norm = clip_global_norm(&mut [&mut g_net, &mut g_ls], self.cfg.grad_clip);
                if !norm.is_finite() {
                    skipped += 1;
                    continue;
                }
                self.opt.policy_adam.step(&mut self.policy.net.params, &g_net);
                self.opt.log_std_adam.step(&mut self.policy.log_std, &g_ls);
            }
            epochs_run += 1;
            kl = self.kl_estimate(batch);
            if kl > 2.0 * target {
                self.opt.clip = (self.opt.clip * 0.5).max(self.cfg.clip_min);
                adjusted = true;
                break;
            }
        }
        if !adjusted && kl < 0.5 * target {
            self.opt.clip = (self.opt.clip * 1.5).min(self.cfg.clip_max);
        }

        for _ in 0..self.cfg.value_epochs {
            for mb in self.minibatches(&mut rng, batch.episodes.len()) {
                let (mut g, _) = self.value_gradient(batch, &mb, &returns);
                let norm = clip_global_norm(&mut [&mut g], self.cfg.grad_clip);
                if !norm.is_finite() {
                    skipped += 1;
                    continue;
                }
                self.opt.value_adam.step(&mut self.value.net.params, &g);
            }
        }
        let value_loss_after = self.batch_value_loss(batch, &returns);

        self.opt.shuffle_rng = rng.state();
        self.opt.updates += 1;
        let mut stats = batch_stats(batch);
        stats.update = self.opt.updates;
        stats.kl = kl;
        stats.clip = self.opt.clip;
        stats.surrogate = surrogate / batch.steps().max(1) as f64;
        stats.value_loss_before = value_loss_before;
        stats.value_loss_after = value_loss_after;
        stats.log_std_mean =
            self.policy.log_std.iter().sum::<f64>() / self.policy.log_std.len().max(1) as f64;
        stats.policy_epochs_run = epochs_run;
        stats.skipped_steps = skipped;
        stats
    }
}

/// Reward and terminal statistics of a batch, without optimizer fields.
pub fn batch_stats(batch: &RolloutBatch) -> UpdateStats {
    let rewards: Vec<f64> = batch.episodes.iter().map(|e| e.total_reward()).collect();
    let terms: Vec<_> = batch.episodes.iter().filter_map(|e| e.terminal.as_ref()).collect();
    let mean = |xs: &[f64]| if xs.is_empty() { 0.0 } else { xs.iter().sum::<f64>() / xs.len() as f64 };
    let max = |xs: &[f64]| xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let miss: Vec<f64> = terms.iter().map(|t| t.miss).collect();
    let speed: Vec<f64> = terms.iter().map(|t| t.speed).collect();
    UpdateStats {
        update: 0,
        episodes: batch.episodes.len(),
        steps: batch.steps(),
        mean_reward: mean(&rewards),
        min_reward: rewards.iter().cloned().fold(f64::INFINITY, f64::min),
        max_reward: max(&rewards),
        mean_miss: mean(&miss),
        max_miss: max(&miss),
        mean_speed: mean(&speed),
        max_speed: max(&speed),
        good_fraction: if terms.is_empty() {
            0.0
        } else {
            terms.iter().filter(|t| t.good).count() as f64 / terms.len() as f64
        },
        kl: 0.0,
        clip: 0.0,
        surrogate: 0.0,
        value_loss_before: 0.0,
        value_loss_after: 0.0,
        log_std_mean: 0.0,
        policy_epochs_run: 0,
        skipped_steps: 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ppo::{collect_rollouts, DoubleIntegrator};

    fn setup(cfg: PpoConfig) -> (Trainer, RolloutBatch) {
        let trainer = Trainer::new(cfg, 2, 1, 3).unwrap();
        let seeds: Vec<u64> = (0..10).collect();
        let batch =
            collect_rollouts(DoubleIntegrator::default, &trainer.policy, &trainer.value, &seeds, false)
                .unwrap();
        (trainer, batch)
    }

    #[test]
    fn zero_learning_rates_leave_parameters() {
        let (mut t, batch) = setup(PpoConfig {
            lr_policy: 0.0,
            lr_value: 0.0,
            ..PpoConfig::default()
        });
        let before = (t.policy.clone(), t.value.clone());
        let stats = t.update(&batch);
        assert_eq!(before, (t.policy.clone(), t.value.clone()));
        assert_eq!(stats.kl, 0.0);
    }

    #[test]
    fn first_epoch_ratio_is_one() {
        let (t, batch) = setup(PpoConfig::default());
        let lp = t.current_log_probs(&batch);
        for (e, l) in batch.episodes.iter().zip(&lp) {
            for (a, b) in e.logp.iter().zip(l) {
                assert_eq!(prob_ratio(*b, *a), 1.0);
            }
        }
        assert_eq!(t.kl_estimate(&batch), 0.0);
    }

    #[test]
    fn advantages_are_normalized_returns_minus_values() {
        let (t, batch) = setup(PpoConfig {
            normalize_advantages: false,
            ..PpoConfig::default()
        });
        let (ret, adv) = t.advantages(&batch);
        let e = &batch.episodes[0];
        assert_eq!(ret[0], discounted_returns(&e.rewards, 0.99));
        assert!((adv[0][3] - (ret[0][3] - e.values[3])).abs() < 1e-15);
        let (_, adv) = Trainer { cfg: PpoConfig::default(), ..t }.advantages(&batch);
        let flat: Vec<f64> = adv.into_iter().flatten().collect();
        let mean = flat.iter().sum::<f64>() / flat.len() as f64;
        assert!(mean.abs() < 1e-12);
    }

    #[test]
    fn value_fit_decreases_loss() {
        let (mut t, batch) = setup(PpoConfig::default());
        let (returns, _) = t.advantages(&batch);
        let mut last = t.batch_value_loss(&batch, &returns);
        let all: Vec<usize> = (0..batch.episodes.len()).collect();
        for _ in 0..30 {
            let (g, _) = t.value_gradient(&batch, &all, &returns);
            t.opt.value_adam.step(&mut t.value.net.params, &g);
            let now = t.batch_value_loss(&batch, &returns);
            assert!(now < last, "{now} !< {last}");
            last = now;
        }
    }

    #[test]
    fn update_is_deterministic() {
        let (mut a, batch) = setup(PpoConfig::default());
        let mut b = a.clone();
        let sa = a.update(&batch);
        let sb = b.update(&batch);
        assert_eq!(sa, sb);
        assert_eq!(a, b);
        assert!(sa.clip >= 1e-3 && sa.clip <= 0.5);
    }

    #[test]
    fn policy_gradient_matches_finite_difference() {
        let (mut t, batch) = setup(PpoConfig::default());
        // Move off the collection policy so ratios differ from one.
        for p in t.policy.net.params.iter_mut().step_by(7) {
            *p += 0.05;
        }
        let (_, adv) = t.advantages(&batch);
        let eps = t.opt.clip;
        let eps_sel: Vec<usize> = vec![0, 2, 5];
        let (g, _, _) = t.policy_gradient(&batch, &eps_sel, &adv);
        let loss = |tr: &Trainer| -> f64 {
            let lp = tr.current_log_probs(&batch);
            let n: usize = eps_sel.iter().map(|&e| batch.episodes[e].len()).sum();
            -eps_sel
                .iter()
                .flat_map(|&e| {
                    let ep = &batch.episodes[e];
                    (0..ep.len()).map(move |k| (e, k)).collect::<Vec<_>>()
                })
                .map(|(e, k)| clipped_term(prob_ratio(lp[e][k], batch.episodes[e].logp[k]), adv[e][k], eps))
                .sum::<f64>()
                / n as f64
        };
        let mut rng = SimRng::seed_from(9);
        for _ in 0..20 {
            let i = rng.index(g.len());
            let saved = t.policy.net.params[i];
            t.policy.net.params[i] = saved + 1e-6;
            let up = loss(&t);
            t.policy.net.params[i] = saved - 1e-6;
            let down = loss(&t);
            t.policy.net.params[i] = saved;
            let fd = (up - down) / 2e-6;
            assert!(crate::neural::relative_error(g[i], fd, 1e-6) < 1e-4, "{} vs {fd}", g[i]);
        }
    }
}

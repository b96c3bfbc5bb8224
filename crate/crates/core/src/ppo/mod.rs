//! Recurrent proximal policy optimization.
//!
//! Batches of complete episodes are collected in parallel, advantages are
//! empirical discounted returns minus the value baseline, and both networks
//! are trained with truncated backpropagation through time from the hidden
//! states recorded during collection. The clip parameter adapts to keep the
//! measured KL divergence near its target.

mod adam;
mod environment;
mod objective;
mod rollout;
mod trainer;

pub use adam::{clip_global_norm, Adam};
pub use environment::{DoubleIntegrator, Environment, TerminalMetrics, Transition};
pub use objective::{
    clipped_objective, clipped_term, clipped_term_grad, discounted_returns, normalize, prob_ratio,
    value_loss, MAX_RATIO,
};
pub use rollout::{collect_rollouts, run_episode, EpisodeRollout, RolloutBatch, MAX_EPISODE_STEPS};
pub use trainer::{batch_stats, OptimizerState, PpoConfig, Trainer, UpdateStats};

/// Ratio overflow guard.
pub const MAX_RATIO: f64 = 1e6;

/// Discounted return-to-go within one episode.
pub fn discounted_returns(rewards: &[f64], gamma: f64) -> Vec<f64> {
    let mut out = vec![0.0; rewards.len()];
    let mut acc = 0.0;
    for k in (0..rewards.len()).rev() {
        acc = rewards[k] + gamma * acc;
        out[k] = acc;
    }
    out
}

/// Shift and scale to zero mean and unit variance; a constant input maps to
/// zeros.
pub fn normalize(xs: &mut [f64]) {
    if xs.is_empty() {
        return;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let sd = var.sqrt();
    for x in xs.iter_mut() {
        *x = if sd > 1e-12 { (*x - mean) / sd } else { 0.0 };
    }
}

/// `exp(logp_new − logp_old)`, capped at [`MAX_RATIO`].
pub fn prob_ratio(logp_new: f64, logp_old: f64) -> f64 {
    (logp_new - logp_old).exp().min(MAX_RATIO)
}

/// Per-sample clipped surrogate `min(p A, clip(p, 1−ε, 1+ε) A)`.
pub fn clipped_term(p: f64, adv: f64, eps: f64) -> f64 {
    (p * adv).min(p.clamp(1.0 - eps, 1.0 + eps) * adv)
}

/// Derivative of [`clipped_term`] with respect to `p`: `A` when the
/// unclipped branch is active, otherwise zero.
pub fn clipped_term_grad(p: f64, adv: f64, eps: f64) -> f64 {
    let unclipped = p * adv;
    let clipped = p.clamp(1.0 - eps, 1.0 + eps) * adv;
    if unclipped <= clipped {
        adv
    } else {
        0.0
    }
}

/// Batch mean of the clipped surrogate.
pub fn clipped_objective(ratios: &[f64], advantages: &[f64], eps: f64) -> f64 {
    if ratios.is_empty() {
        return 0.0;
    }
    ratios
        .iter()
        .zip(advantages)
        .map(|(&p, &a)| clipped_term(p, a, eps))
        .sum::<f64>()
        / ratios.len() as f64
}

/// Mean squared error between value predictions and returns.
pub fn value_loss(values: &[f64], returns: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values
        .iter()
        .zip(returns)
        .map(|(v, r)| (v - r).powi(2))
        .sum::<f64>()
        / values.len() as f64
}

use serde::{Deserialize, Serialize};

use crate::math::SimRng;

/// Largest relative discrepancy found by [`check_gradient`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradCheckReport {
    pub probes: usize,
    pub max_rel_error: f64,
    pub worst_index: usize,
}

/// `|a − n| / max(|a|, |n|, floor)`.
pub fn relative_error(analytic: f64, numeric: f64, floor: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(floor)
}

/// Compare `analytic[i]` with the central difference of `loss` at `probes`
/// randomly chosen parameter indices.
pub fn check_gradient<F>(
    params: &mut [f64],
    analytic: &[f64],
    mut loss: F,
    probes: usize,
    step: f64,
    rng: &mut SimRng,
) -> GradCheckReport
where
    F: FnMut(&[f64]) -> f64,
{
    let mut worst = (0.0, 0);
    for _ in 0..probes {
        let i = rng.index(params.len());
        let saved = params[i];
        params[i] = saved + step;
        let up = loss(params);
        params[i] = saved - step;
        let down = loss(params);
        params[i] = saved;
        let numeric = (up - down) / (2.0 * step);
        let err = relative_error(analytic[i], numeric, 1e-6);
        if err > worst.0 {
            worst = (err, i);
        }
    }
    GradCheckReport {
        probes,
        max_rel_error: worst.0,
        worst_index: worst.1,
    }
}

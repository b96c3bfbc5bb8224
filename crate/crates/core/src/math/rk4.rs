use crate::{Error, Result};

/// One classical fourth-order Runge-Kutta step of `ẏ = f(t, y)`.
///
/// Fails with [`Error::Propagation`] if any stage derivative is non-finite and
/// with [`Error::InvalidInput`] if `dt` is not strictly positive. Callers that
/// carry quaternions in `y` renormalize them afterwards.
pub fn rk4_step<const N: usize, F>(mut f: F, t: f64, y: &[f64; N], dt: f64) -> Result<[f64; N]>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::InvalidInput(format!("step size must be positive, got {dt}")));
    }
    let mut eval = |t: f64, y: &[f64; N], stage: usize| -> Result<[f64; N]> {
        let k = f(t, y);
        if k.iter().all(|v| v.is_finite()) {
            Ok(k)
        } else {
            Err(Error::Propagation(format!(
                "non-finite derivative in RK4 stage {stage} at t = {t}"
            )))
        }
    };
    let offset = |k: &[f64; N], h: f64| -> [f64; N] {
        let mut out = *y;
        for (o, ki) in out.iter_mut().zip(k) {
            *o += h * ki;
        }
        out
    };

    let k1 = eval(t, y, 1)?;
    let k2 = eval(t + 0.5 * dt, &offset(&k1, 0.5 * dt), 2)?;
    let k3 = eval(t + 0.5 * dt, &offset(&k2, 0.5 * dt), 3)?;
    let k4 = eval(t + dt, &offset(&k3, dt), 4)?;

    let mut out = *y;
    for i in 0..N {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_derivative_leaves_state() {
        let y = [1.5, -2.0, 3.25];
        let out = rk4_step(|_, _| [0.0; 3], 0.0, &y, 0.7).unwrap();
        assert_eq!(out, y);
    }

    #[test]
    fn exponential_growth_one_step() {
        let out = rk4_step(|_, y: &[f64; 1]| [y[0]], 0.0, &[1.0], 0.1).unwrap();
        // Taylor series of e^h through h^4: 1 + h + h²/2 + h³/6 + h⁴/24.
        let h: f64 = 0.1;
        let taylor4 = 1.0 + h + h * h / 2.0 + h.powi(3) / 6.0 + h.powi(4) / 24.0;
        assert!((out[0] - taylor4).abs() < 1e-15);
        assert!((out[0] - 1.105_170_83).abs() < 1e-8);
        assert!((out[0] - h.exp()).abs() < h.powi(5) / 120.0 * 1.2);
    }

    #[test]
    fn oscillator_energy_drift() {
        let mut y = [1.0, 0.0];
        let dt = 0.01;
        for i in 0..1000 {
            y = rk4_step(|_, s: &[f64; 2]| [s[1], -s[0]], i as f64 * dt, &y, dt).unwrap();
        }
        let energy = 0.5 * (y[0] * y[0] + y[1] * y[1]);
        assert!(((energy - 0.5) / 0.5).abs() < 1e-8);
        assert!((y[0] - 10f64.cos()).abs() < 1e-8);
    }

    #[test]
    fn local_error_scales_with_fifth_power() {
        let err = |h: f64| {
            let out = rk4_step(|_, y: &[f64; 1]| [y[0]], 0.0, &[1.0], h).unwrap();
            (out[0] - h.exp()).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!((ratio / 32.0 - 1.0).abs() < 0.2, "ratio {ratio}");
    }

    #[test]
    fn non_finite_derivative_is_propagation_error() {
        let r = rk4_step(|_, _: &[f64; 1]| [f64::NAN], 0.0, &[0.0], 1.0);
        assert!(matches!(r, Err(Error::Propagation(_))));
        let r = rk4_step(|_, _: &[f64; 1]| [0.0], 0.0, &[0.0], 0.0);
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }
}

use serde::{Deserialize, Serialize};

use super::Measurement;
use crate::math::{Quaternion, Vec3};

/// Length of the normalized observation vector.
pub const OBS_DIM: usize = 13;

/// Time-to-go reported when the closing velocity is not positive, s.
pub const T_GO_MAX: f64 = 1.0e4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VelocityReferenceParams {
    /// Asymptotic reference speed, m/s.
    pub v0: f64,
    /// Shaping time constant, s.
    pub tau: f64,
}

impl Default for VelocityReferenceParams {
    fn default() -> Self {
        Self { v0: 0.5, tau: 300.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityReference {
    pub v_ref: f64,
    pub t_go: f64,
    pub v_error: f64,
    /// Set when `v_c ≤ 0` forced `t_go` to [`T_GO_MAX`].
    pub singular: bool,
}

/// Shaped closing-velocity reference for range `r` and closing velocity `v_c`.
pub fn velocity_reference(r: f64, v_c: f64, params: &VelocityReferenceParams) -> VelocityReference {
    let (t_go, singular) = if v_c > 0.0 {
        ((r.max(0.0) / v_c).min(T_GO_MAX), false)
    } else {
        (T_GO_MAX, true)
    };
    let v_ref = params.v0 * (1.0 - (-t_go / params.tau).exp());
    VelocityReference {
        v_ref,
        t_go,
        v_error: v_ref - v_c,
        singular,
    }
}

/// Physical-unit observation; [`ObservationVector::normalized`] produces
/// the network input.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationVector {
    pub theta_u: f64,
    pub theta_v: f64,
    pub theta_u_rate: f64,
    pub theta_v_rate: f64,
    pub v_error: f64,
    pub t_go: f64,
    pub dq: Quaternion,
    pub omega: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ObservationScales {
    pub angle: f64,
    pub rate: f64,
    pub v_error: f64,
    pub t_go: f64,
    pub omega: f64,
}

impl Default for ObservationScales {
    fn default() -> Self {
        Self {
            angle: 0.8,
            rate: 0.01,
            v_error: 0.5,
            t_go: 2000.0,
            omega: 0.1,
        }
    }
}

impl ObservationVector {
    pub fn normalized(&self, s: &ObservationScales) -> [f64; OBS_DIM] {
        let dq = self.dq.to_array();
        [
            self.theta_u / s.angle,
            self.theta_v / s.angle,
            self.theta_u_rate / s.rate,
            self.theta_v_rate / s.rate,
            self.v_error / s.v_error,
            self.t_go / s.t_go,
            dq[0],
            dq[1],
            dq[2],
            dq[3],
            self.omega.x / s.omega,
            self.omega.y / s.omega,
            self.omega.z / s.omega,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.normalized(&ObservationScales::default())
            .iter()
            .all(|x| x.is_finite())
    }
}

/// Guidance-rate history needed to turn raw measurements into observations:
/// backward-differenced angle rates and a low-pass filtered closing velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeekerTracker {
    /// Guidance period, s.
    pub dt: f64,
    /// Closing-velocity filter time constant, s.
    pub filter_tau: f64,
    /// Target offset subtracted from the measured range, m.
    pub offset: f64,
    pub reference: VelocityReferenceParams,
    pub v_c: f64,
    prev: Option<(f64, f64, f64)>,
}

impl SeekerTracker {
    /// `v_c0` seeds the closing-velocity filter, usually from the range
    /// change over the open-loop burn.
    pub fn new(dt: f64, offset: f64, v_c0: f64, reference: VelocityReferenceParams) -> Self {
        Self {
            dt,
            filter_tau: dt,
            offset,
            reference,
            v_c: v_c0,
            prev: None,
        }
    }

    pub fn adjusted_range(&self, m: &Measurement) -> f64 {
        m.range - self.offset
    }

    /// Fold in one measurement taken a guidance period after the previous one.
    pub fn observe(&mut self, m: &Measurement) -> (ObservationVector, VelocityReference) {
        let range = self.adjusted_range(m);
        let (u_rate, v_rate) = match self.prev {
            Some((pu, pv, pr)) => {
                let raw = (pr - range) / self.dt;
                let alpha = self.dt / (self.filter_tau + self.dt);
                self.v_c += alpha * (raw - self.v_c);
                ((m.theta_u - pu) / self.dt, (m.theta_v - pv) / self.dt)
            }
            None => (0.0, 0.0),
        };
        self.prev = Some((m.theta_u, m.theta_v, range));
        let vr = velocity_reference(range, self.v_c, &self.reference);
        let obs = ObservationVector {
            theta_u: m.theta_u,
            theta_v: m.theta_v,
            theta_u_rate: u_rate,
            theta_v_rate: v_rate,
            v_error: vr.v_error,
            t_go: vr.t_go,
            dq: m.dq,
            omega: m.omega,
        };
        (obs, vr)
    }
}

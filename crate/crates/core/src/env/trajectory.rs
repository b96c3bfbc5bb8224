use std::io::Write;

use serde::{Deserialize, Serialize};

use super::StepResult;
use crate::math::{Quaternion, Vec3};
use crate::spacecraft::{SpacecraftState, ThrusterCommand, NUM_THRUSTERS};
use crate::Result;

/// One guidance step of an episode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub t: f64,
    pub r: Vec3,
    pub v: Vec3,
    pub q: Quaternion,
    pub omega: Vec3,
    pub mass: f64,
    pub obs: [f64; 13],
    pub action: ThrusterCommand,
    pub reward: f64,
    pub theta_bv: f64,
    pub adjusted_range: f64,
    pub v_c: f64,
}

impl TrajectoryRecord {
    pub fn new(
        state: &SpacecraftState,
        cmd: &ThrusterCommand,
        step: &StepResult,
        obs: [f64; 13],
    ) -> Self {
        Self {
            t: step.info.t,
            r: state.r,
            v: state.v,
            q: state.q,
            omega: state.omega,
            mass: state.mass,
            obs,
            action: *cmd,
            reward: step.reward,
            theta_bv: step.info.theta_bv,
            adjusted_range: step.info.adjusted_range,
            v_c: step.info.v_c,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub records: Vec<TrajectoryRecord>,
}

const OBS_NAMES: [&str; 13] = [
    "obs_theta_u",
    "obs_theta_v",
    "obs_theta_u_rate",
    "obs_theta_v_rate",
    "obs_v_error",
    "obs_t_go",
    "obs_dq0",
    "obs_dq1",
    "obs_dq2",
    "obs_dq3",
    "obs_wx",
    "obs_wy",
    "obs_wz",
];

impl Trajectory {
    pub fn header() -> Vec<String> {
        let mut h: Vec<String> = [
            "t", "rx", "ry", "rz", "vx", "vy", "vz", "q0", "q1", "q2", "q3", "wx", "wy", "wz",
            "mass",
        ]
        .iter()
        .map(|s| s.to_string())
        .collect();
        h.extend(OBS_NAMES.iter().map(|s| s.to_string()));
        h.extend((1..=NUM_THRUSTERS).map(|i| format!("thr{i}")));
        h.extend(["reward", "theta_bv", "adjusted_range", "v_c"].iter().map(|s| s.to_string()));
        h
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(Self::header())?;
        for rec in &self.records {
            let mut row: Vec<String> = vec![rec.t.to_string()];
            row.extend(rec.r.iter().chain(rec.v.iter()).map(|x| x.to_string()));
            row.extend(rec.q.to_array().iter().map(|x| x.to_string()));
            row.extend(rec.omega.iter().map(|x| x.to_string()));
            row.push(rec.mass.to_string());
            row.extend(rec.obs.iter().map(|x| x.to_string()));
            row.extend(rec.action.iter().map(|&a| u8::from(a).to_string()));
            row.extend(
                [rec.reward, rec.theta_bv, rec.adjusted_range, rec.v_c]
                    .iter()
                    .map(|x| x.to_string()),
            );
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }
}

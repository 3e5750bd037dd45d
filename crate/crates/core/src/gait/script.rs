//! Open-loop keyframe sequences (stair entry, low crawl, jump, backflip).
//!
//! A script is a JSON list of keyframes:
//!
//! ```json
//! [
//!   {"time_s": 0.0, "interpolation": "linear",
//!    "legs": {"fl": {"joint": {"q1": -2.0, "q2": 1.6}},
//!             "fr": {"cartesian": {"x": 0.0, "y": -0.04, "branch": "elbow_minus"}},
//!             "rl": {"joint": {"q1": -2.0, "q2": 1.6}},
//!             "rr": {"joint": {"q1": -2.0, "q2": 1.6}}}}
//! ]
//! ```
//!
//! Joint targets are taken literally, so a script can command whole turns.
//! Cartesian targets are solved with inverse kinematics and unwrapped toward
//! the previous keyframe. `interpolation` applies to the segment that leaves
//! the keyframe: `linear` ramps in actuator space, `hold` keeps the pose until
//! the next keyframe.

use serde::{Deserialize, Serialize};

use crate::legkin::{
    inverse_kinematics, joint_to_actuator, ActuatorAngles, Branch, FootPoint, JointAngles,
    LegGeometry,
};

use super::{unwrap_toward, ActuatorTrajectory, GaitError, LegId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    #[default]
    Linear,
    Hold,
}

fn default_branch() -> Branch {
    Branch::ElbowPlus
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LegTarget {
    Joint {
        q1: f64,
        q2: f64,
    },
    Cartesian {
        x: f64,
        y: f64,
        #[serde(default = "default_branch")]
        branch: Branch,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegTargets {
    pub fl: LegTarget,
    pub fr: LegTarget,
    pub rl: LegTarget,
    pub rr: LegTarget,
}

impl LegTargets {
    pub fn get(&self, leg: LegId) -> &LegTarget {
        match leg {
            LegId::FrontLeft => &self.fl,
            LegId::FrontRight => &self.fr,
            LegId::RearLeft => &self.rl,
            LegId::RearRight => &self.rr,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Keyframe {
    pub time_s: f64,
    pub legs: LegTargets,
    #[serde(default)]
    pub interpolation: Interpolation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct KeyframeScript {
    pub keyframes: Vec<Keyframe>,
}

const BUILTIN: [(&str, &str); 4] = [
    (
        "stair_front_place",
        include_str!("../../scripts/stair_front_place.json"),
    ),
    ("low_crawl", include_str!("../../scripts/low_crawl.json")),
    ("jump", include_str!("../../scripts/jump.json")),
    ("backflip", include_str!("../../scripts/backflip.json")),
];

impl KeyframeScript {
    pub fn from_json(text: &str) -> Result<Self, GaitError> {
        let script: Self =
            serde_json::from_str(text).map_err(|e| GaitError::InvalidScript(e.to_string()))?;
        script.validate()?;
        Ok(script)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("keyframes always serialize")
    }

    pub fn builtin_names() -> impl Iterator<Item = &'static str> {
        BUILTIN.iter().map(|(n, _)| *n)
    }

    pub fn builtin(name: &str) -> Option<Self> {
        BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .map(|(_, text)| Self::from_json(text).expect("bundled scripts are valid"))
    }

    pub fn validate(&self) -> Result<(), GaitError> {
        let first = self
            .keyframes
            .first()
            .ok_or_else(|| GaitError::InvalidScript("no keyframes".into()))?;
        if !(first.time_s >= 0.0) {
            return Err(GaitError::InvalidScript(
                "first keyframe time is negative".into(),
            ));
        }
        if let Some(w) = self
            .keyframes
            .windows(2)
            .find(|w| !(w[1].time_s > w[0].time_s))
        {
            return Err(GaitError::InvalidScript(format!(
                "keyframe times must increase ({} then {})",
                w[0].time_s, w[1].time_s
            )));
        }
        Ok(())
    }

    /// Actuator pose of every keyframe, Cartesian targets unwrapped toward the
    /// previous keyframe (or `initial` for the first).
    pub fn resolve(
        &self,
        geom: &LegGeometry,
        initial: &[ActuatorAngles; 4],
    ) -> Result<Vec<[ActuatorAngles; 4]>, GaitError> {
        let mut prev = *initial;
        let mut poses = Vec::with_capacity(self.keyframes.len());
        for kf in &self.keyframes {
            let mut pose = prev;
            for leg in LegId::ALL {
                let l = leg.index();
                pose[l] = match *kf.legs.get(leg) {
                    LegTarget::Joint { q1, q2 } => joint_to_actuator(JointAngles::new(q1, q2)),
                    LegTarget::Cartesian { x, y, branch } => {
                        let sol = inverse_kinematics(geom, FootPoint::new(x, y), branch).map_err(
                            |source| GaitError::Unreachable {
                                leg,
                                time: kf.time_s,
                                source,
                            },
                        )?;
                        ActuatorAngles::new(
                            unwrap_toward(prev[l].theta1, sol.actuators.theta1),
                            unwrap_toward(prev[l].theta2, sol.actuators.theta2),
                        )
                    }
                };
            }
            poses.push(pose);
            prev = pose;
        }
        Ok(poses)
    }

    /// Sample the script at `dt` from `t = 0` to the last keyframe. Before the
    /// first keyframe the legs ramp linearly from `initial`.
    pub fn render(
        &self,
        geom: &LegGeometry,
        dt: f64,
        omega_max: f64,
        initial: &[ActuatorAngles; 4],
    ) -> Result<ActuatorTrajectory, GaitError> {
        self.validate()?;
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(GaitError::InvalidParams(format!(
                "dt {dt} must be positive"
            )));
        }
        let mut poses = self.resolve(geom, initial)?;
        let mut times: Vec<f64> = self.keyframes.iter().map(|k| k.time_s).collect();
        let mut modes: Vec<Interpolation> =
            self.keyframes.iter().map(|k| k.interpolation).collect();
        if times[0] > 0.0 {
            times.insert(0, 0.0);
            modes.insert(0, Interpolation::Linear);
            poses.insert(0, *initial);
        }
        let end = *times.last().unwrap();
        let steps = (end / dt).round() as usize;
        let samples = (0..=steps)
            .map(|k| {
                let t = (k as f64 * dt).min(end);
                let seg = times.partition_point(|&x| x <= t).saturating_sub(1);
                if seg + 1 == times.len() {
                    return poses[seg];
                }
                match modes[seg] {
                    Interpolation::Hold => poses[seg],
                    Interpolation::Linear => {
                        let f = (t - times[seg]) / (times[seg + 1] - times[seg]);
                        let (a, b) = (&poses[seg], &poses[seg + 1]);
                        std::array::from_fn(|l| {
                            ActuatorAngles::new(
                                a[l].theta1 + (b[l].theta1 - a[l].theta1) * f,
                                a[l].theta2 + (b[l].theta2 - a[l].theta2) * f,
                            )
                        })
                    }
                }
            })
            .collect();
        let traj = ActuatorTrajectory { dt, samples };
        traj.check_speed(omega_max)?;
        Ok(traj)
    }
}

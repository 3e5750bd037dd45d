//! Gait and trajectory synthesis.
//!
//! Foot paths are periodic curves in the hip frame (x forward, y up). They are
//! turned into actuator streams by per-sample inverse kinematics followed by
//! unwrapping, so a foot that circles the hip produces an actuator angle that
//! keeps growing instead of resetting every turn.

mod script;
mod trajectory;

use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legkin::{
    actuator_to_joint, inverse_kinematics, joint_to_actuator, ActuatorAngles, Branch, FootPoint,
    JointAngles, KinematicsError, LegGeometry,
};

pub use script::{Interpolation, Keyframe, KeyframeScript, LegTarget, LegTargets};
pub use trajectory::{shortest_delta, unwrap_toward, ActuatorTrajectory, CSV_HEADER};

/// Inversion recovery must complete within this time, in seconds.
pub const FLIP_DEADLINE: f64 = 0.5;

#[derive(Debug, Error)]
pub enum GaitError {
    #[error("invalid gait parameters: {0}")]
    InvalidParams(String),
    #[error("{leg} foot target unreachable at t = {time} s: {source}")]
    Unreachable {
        leg: LegId,
        time: f64,
        #[source]
        source: KinematicsError,
    },
    #[error("{leg} actuator {channel} needs {rate} rad/s at t = {time} s (limit {limit} rad/s)")]
    SpeedViolation {
        leg: LegId,
        channel: usize,
        time: f64,
        rate: f64,
        limit: f64,
    },
    #[error("invalid keyframe script: {0}")]
    InvalidScript(String),
    #[error("invalid trajectory file: {0}")]
    InvalidTrajectory(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LegId {
    #[serde(rename = "fl")]
    FrontLeft,
    #[serde(rename = "fr")]
    FrontRight,
    #[serde(rename = "rl")]
    RearLeft,
    #[serde(rename = "rr")]
    RearRight,
}

impl LegId {
    pub const ALL: [LegId; 4] = [
        LegId::FrontLeft,
        LegId::FrontRight,
        LegId::RearLeft,
        LegId::RearRight,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn label(self) -> &'static str {
        match self {
            LegId::FrontLeft => "fl",
            LegId::FrontRight => "fr",
            LegId::RearLeft => "rl",
            LegId::RearRight => "rr",
        }
    }
}

impl fmt::Display for LegId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Parameters of a line-stance, arc-swing stride gait. Leg order in the
/// per-leg arrays is `[FL, FR, RL, RR]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitParams {
    pub name: String,
    pub step_length: f64,
    pub step_height: f64,
    pub body_height: f64,
    pub frequency: f64,
    pub duty: f64,
    pub phase_offsets: [f64; 4],
    pub elbow: [Branch; 4],
}

const TROT_OFFSETS: [f64; 4] = [0.0, 0.5, 0.5, 0.0];
const CRAWL_OFFSETS: [f64; 4] = [0.0, 0.5, 0.25, 0.75];

impl GaitParams {
    fn preset(
        name: &str,
        step: f64,
        lift: f64,
        height: f64,
        freq: f64,
        duty: f64,
        offsets: [f64; 4],
    ) -> Self {
        Self {
            name: name.to_string(),
            step_length: step,
            step_height: lift,
            body_height: height,
            frequency: freq,
            duty,
            phase_offsets: offsets,
            elbow: [Branch::ElbowPlus; 4],
        }
    }

    // Toolkit defaults sized for the 29 mm + 29 mm leg.

    pub fn slow_trot() -> Self {
        Self::preset("slow_trot", 0.024, 0.010, 0.035, 2.5, 0.5, TROT_OFFSETS)
    }

    pub fn fast_trot() -> Self {
        Self::preset("fast_trot", 0.032, 0.010, 0.035, 7.0, 0.5, TROT_OFFSETS)
    }

    pub fn high_trot() -> Self {
        Self::preset("high_trot", 0.020, 0.010, 0.045, 4.0, 0.5, TROT_OFFSETS)
    }

    pub fn crawl() -> Self {
        Self::preset("crawl", 0.015, 0.010, 0.035, 1.5, 0.75, CRAWL_OFFSETS)
    }

    pub fn presets() -> Vec<Self> {
        vec![
            Self::slow_trot(),
            Self::fast_trot(),
            Self::high_trot(),
            Self::crawl(),
        ]
    }

    pub fn validate(&self) -> Result<(), GaitError> {
        let invalid = |m: String| Err(GaitError::InvalidParams(m));
        if !(self.frequency.is_finite() && self.frequency > 0.0) {
            return invalid(format!("frequency {} must be positive", self.frequency));
        }
        if !(self.duty > 0.0 && self.duty < 1.0) {
            return invalid(format!("duty {} must lie in (0, 1)", self.duty));
        }
        if let Some(o) = self
            .phase_offsets
            .iter()
            .find(|o| !(**o >= 0.0 && **o < 1.0))
        {
            return invalid(format!("phase offset {o} must lie in [0, 1)"));
        }
        if !(self.step_length >= 0.0 && self.step_length.is_finite()) {
            return invalid(format!(
                "step length {} must be non-negative",
                self.step_length
            ));
        }
        if !(self.step_height >= 0.0 && self.step_height.is_finite()) {
            return invalid(format!(
                "step height {} must be non-negative",
                self.step_height
            ));
        }
        if !(self.body_height > 0.0 && self.body_height.is_finite()) {
            return invalid(format!("body height {} must be positive", self.body_height));
        }
        Ok(())
    }
}

/// Periodic foot curve in the hip frame, parameterized by leg phase in `[0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FootPath {
    /// Straight stance at `y = -body_height` from `+L/2` back to `-L/2` over
    /// the duty fraction, then a half-ellipse swing of apex `step_height`.
    /// A zero-length stride is a stand: the foot stays put.
    Stride {
        step_length: f64,
        step_height: f64,
        body_height: f64,
        duty: f64,
    },
    /// Counter-clockwise circle, starting at angle zero.
    Circle { center: FootPoint, radius: f64 },
}

impl FootPath {
    pub fn point(&self, phase: f64) -> FootPoint {
        let psi = phase.rem_euclid(1.0);
        match *self {
            FootPath::Stride {
                step_length,
                step_height,
                body_height,
                duty,
            } => {
                let half = step_length / 2.0;
                if step_length == 0.0 {
                    FootPoint::new(0.0, -body_height)
                } else if psi < duty {
                    FootPoint::new(half - step_length * psi / duty, -body_height)
                } else {
                    let s = (psi - duty) / (1.0 - duty);
                    let (sin, cos) = (PI * s).sin_cos();
                    FootPoint::new(-half * cos, -body_height + step_height * sin)
                }
            }
            FootPath::Circle { center, radius } => {
                let (sin, cos) = (2.0 * PI * psi).sin_cos();
                FootPoint::new(center.x + radius * cos, center.y + radius * sin)
            }
        }
    }

    /// Whether the foot is on the ground at this leg phase. Circles have no stance.
    pub fn in_stance(&self, phase: f64) -> bool {
        match *self {
            FootPath::Stride { duty, .. } => phase.rem_euclid(1.0) < duty,
            FootPath::Circle { .. } => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaitSpec {
    pub name: String,
    pub frequency: f64,
    pub phase_offsets: [f64; 4],
    pub elbow: [Branch; 4],
    pub path: FootPath,
}

impl GaitSpec {
    pub fn period(&self) -> f64 {
        1.0 / self.frequency
    }

    /// Phase of `leg` when the gait clock reads `phase`.
    pub fn leg_phase(&self, leg: LegId, phase: f64) -> f64 {
        (phase + self.phase_offsets[leg.index()]).rem_euclid(1.0)
    }

    pub fn in_stance(&self, leg: LegId, phase: f64) -> bool {
        self.path.in_stance(self.leg_phase(leg, phase))
    }

    /// Every leg traces a hip-centred circle; used to exercise unbounded rotation.
    pub fn hip_circle(radius: f64, frequency: f64, elbow: Branch) -> Self {
        Self {
            name: "hip_circle".into(),
            frequency,
            phase_offsets: [0.0; 4],
            elbow: [elbow; 4],
            path: FootPath::Circle {
                center: FootPoint::default(),
                radius,
            },
        }
    }
}

/// Build a stride gait, rejecting strides that leave the leg's reach.
pub fn make_gait(params: &GaitParams, geom: &LegGeometry) -> Result<GaitSpec, GaitError> {
    params.validate()?;
    let reach = geom.reach();
    let h = params.body_height;
    if h > reach {
        return Err(GaitError::InvalidParams(format!(
            "body height {h} exceeds leg reach {reach}"
        )));
    }
    let chord = 2.0 * (reach * reach - h * h).max(0.0).sqrt();
    if params.step_length > chord {
        return Err(GaitError::InvalidParams(format!(
            "step length {} exceeds workspace chord {chord} at body height {h}",
            params.step_length
        )));
    }
    let spec = GaitSpec {
        name: params.name.clone(),
        frequency: params.frequency,
        phase_offsets: params.phase_offsets,
        elbow: params.elbow,
        path: FootPath::Stride {
            step_length: params.step_length,
            step_height: params.step_height,
            body_height: h,
            duty: params.duty,
        },
    };
    const CHECKS: usize = 720;
    for k in 0..CHECKS {
        let p = spec.path.point(k as f64 / CHECKS as f64);
        if !geom.is_reachable(p) {
            return Err(GaitError::InvalidParams(format!(
                "foot path leaves the workspace at ({}, {})",
                p.x, p.y
            )));
        }
    }
    Ok(spec)
}

/// Foot position of `leg` at gait phase `phase` (taken modulo 1).
pub fn sample_foot(spec: &GaitSpec, leg: LegId, phase: f64) -> FootPoint {
    spec.path.point(spec.leg_phase(leg, phase))
}

/// Sampling and continuity settings for actuator streams.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StreamOptions {
    /// Speed cap per actuator, rad/s.
    pub omega_max: f64,
    /// Pose the first sample unwraps toward.
    pub initial: [ActuatorAngles; 4],
}

impl StreamOptions {
    pub fn new(omega_max: f64) -> Self {
        Self {
            omega_max,
            initial: [ActuatorAngles::default(); 4],
        }
    }
}

/// Sample `cycles` gait periods at `dt` (both endpoints included) and convert
/// every foot point to unwrapped actuator angles.
pub fn gait_to_actuator(
    spec: &GaitSpec,
    geom: &LegGeometry,
    dt: f64,
    cycles: usize,
    opts: &StreamOptions,
) -> Result<ActuatorTrajectory, GaitError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(GaitError::InvalidParams(format!(
            "dt {dt} must be positive"
        )));
    }
    let steps = (cycles as f64 * spec.period() / dt).round() as usize;
    let mut prev = opts.initial;
    let mut samples = Vec::with_capacity(steps + 1);
    for k in 0..=steps {
        let t = k as f64 * dt;
        let phase = t * spec.frequency;
        let mut row = [ActuatorAngles::default(); 4];
        for leg in LegId::ALL {
            let l = leg.index();
            let p = sample_foot(spec, leg, phase);
            let sol = inverse_kinematics(geom, p, spec.elbow[l]).map_err(|source| {
                GaitError::Unreachable {
                    leg,
                    time: t,
                    source,
                }
            })?;
            row[l] = ActuatorAngles::new(
                unwrap_toward(prev[l].theta1, sol.actuators.theta1),
                unwrap_toward(prev[l].theta2, sol.actuators.theta2),
            );
        }
        samples.push(row);
        prev = row;
    }
    let traj = ActuatorTrajectory { dt, samples };
    traj.check_speed(opts.omega_max)?;
    Ok(traj)
}

/// Velocity-mode command that turns every leg into a rigid spoke.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotaryCommand {
    /// Commanded rate of every actuator, rad/s.
    pub omega: f64,
    /// Per-leg `[θ̇1, θ̇2]`.
    pub velocities: [[f64; 2]; 4],
    /// Straight-leg pose held at mode entry.
    pub posture: JointAngles,
    pub spoke_length: f64,
}

impl RotaryCommand {
    /// Ground speed of a rigid spoke rolling without slip.
    pub fn rim_speed(&self) -> f64 {
        self.omega.abs() * self.spoke_length
    }

    /// Knee rate implied by the coupling: `q̇2 = θ̇2 - θ̇1`.
    pub fn knee_rate(&self, leg: LegId) -> f64 {
        let [t1, t2] = self.velocities[leg.index()];
        t2 - t1
    }
}

/// Equal rates on both actuators keep `q2` fixed, so a straight leg sweeps as a spoke.
pub fn rotary_command(omega: f64, geom: &LegGeometry) -> RotaryCommand {
    RotaryCommand {
        omega,
        velocities: [[omega, omega]; 4],
        posture: JointAngles::new(-PI / 2.0, 0.0),
        spoke_length: geom.reach(),
    }
}

/// Move every channel to a target that is equivalent modulo 2π, along its
/// shortest arc, at constant rate no faster than `omega_max`.
fn move_to_equivalent(
    current: &[ActuatorAngles; 4],
    target: &[ActuatorAngles; 4],
    dt: f64,
    omega_max: f64,
    deadline: Option<f64>,
) -> Result<ActuatorTrajectory, GaitError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(GaitError::InvalidParams(format!(
            "dt {dt} must be positive"
        )));
    }
    let mut deltas = [[0.0; 2]; 4];
    let mut worst = (0.0, LegId::FrontLeft, 1);
    for leg in LegId::ALL {
        let l = leg.index();
        let (c, t) = (current[l].as_array(), target[l].as_array());
        for ch in 0..2 {
            let d = shortest_delta(t[ch] - c[ch]);
            deltas[l][ch] = d;
            if d.abs() > worst.0 {
                worst = (d.abs(), leg, ch + 1);
            }
        }
    }
    let (travel, leg, channel) = worst;
    if travel <= 1e-12 {
        return Ok(ActuatorTrajectory::empty(dt));
    }
    let steps = (travel / (omega_max * dt)).ceil().max(1.0) as usize;
    let duration = steps as f64 * dt;
    if let Some(limit) = deadline {
        if duration > limit + 1e-12 {
            return Err(GaitError::SpeedViolation {
                leg,
                channel,
                time: limit,
                rate: travel / limit,
                limit: omega_max,
            });
        }
    }
    let samples = (0..=steps)
        .map(|k| {
            let f = k as f64 / steps as f64;
            let mut row = *current;
            for l in 0..4 {
                row[l] = ActuatorAngles::new(
                    current[l].theta1 + deltas[l][0] * f,
                    current[l].theta2 + deltas[l][1] * f,
                );
            }
            row
        })
        .collect();
    Ok(ActuatorTrajectory { dt, samples })
}

/// Inversion recovery: mirror every leg's joints (`q -> -q`), flipping the
/// elbow so the feet land on the other side of the body.
///
/// Returns an empty trajectory when the pose is already its own mirror.
pub fn flip_recovery(
    current: &[ActuatorAngles; 4],
    dt: f64,
    omega_max: f64,
) -> Result<ActuatorTrajectory, GaitError> {
    let target = current.map(|a| joint_to_actuator(actuator_to_joint(a).mirrored()));
    move_to_equivalent(current, &target, dt, omega_max, Some(FLIP_DEADLINE))
}

/// Bring every leg to the straight-leg entry posture of `cmd` before switching
/// the actuators to velocity mode.
pub fn rotary_entry(
    current: &[ActuatorAngles; 4],
    cmd: &RotaryCommand,
    dt: f64,
    omega_max: f64,
) -> Result<ActuatorTrajectory, GaitError> {
    let target = [joint_to_actuator(cmd.posture); 4];
    move_to_equivalent(current, &target, dt, omega_max, None)
}

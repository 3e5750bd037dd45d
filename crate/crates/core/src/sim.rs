//! Quasi-static, no-slip locomotion model.
//!
//! Legs are massless. At every sampled instant the body weight is split
//! equally among the stance feet, each stance leg holds its share through
//! `τ = J_θᵀ F`, and swing legs carry no load. Motor current follows an affine
//! torque/current line between the no-load and stall points, and the body
//! moves exactly one stance stroke per stance phase.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait::{
    make_gait, sample_foot, unwrap_toward, FootPath, GaitError, GaitParams, GaitSpec, LegId,
    RotaryCommand,
};
use crate::legkin::{
    inverse_kinematics, static_torques, ActuatorAngles, JointAngles, KinematicsError, LegGeometry,
    WrenchForce,
};
use crate::metrics::{cot_formula, normalized_speed, DEFAULT_GRAVITY};

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("{leg} foot unreachable at phase {phase}: {source}")]
    Unreachable {
        leg: LegId,
        phase: f64,
        #[source]
        source: KinematicsError,
    },
    #[error("actuator speed {speed} rad/s exceeds the no-load speed {limit} rad/s")]
    SpeedViolation { speed: f64, limit: f64 },
    #[error("torque {torque} N·m exceeds stall torque {stall} N·m")]
    OverTorque { torque: f64, stall: f64 },
    #[error("no foot is on the ground at phase {phase}")]
    NoSupport { phase: f64 },
    #[error("gait `{0}` has no stance stroke")]
    NotAStride(String),
    #[error(transparent)]
    Gait(#[from] GaitError),
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotConfig {
    pub mass: f64,
    pub body_length: f64,
    pub geom: LegGeometry,
    pub gravity: f64,
    pub bus_voltage: f64,
    /// Transmission efficiency in `(0, 1]`; motor torque is the joint torque divided by it.
    #[serde(default = "unit")]
    pub transmission_efficiency: f64,
}

impl Default for RobotConfig {
    fn default() -> Self {
        Self {
            mass: 0.240,
            body_length: 0.088,
            geom: LegGeometry::default(),
            gravity: DEFAULT_GRAVITY,
            bus_voltage: 6.0,
            transmission_efficiency: 1.0,
        }
    }
}

impl RobotConfig {
    pub fn validate(&self) -> Result<(), SimError> {
        let positive = [self.mass, self.body_length, self.gravity, self.bus_voltage]
            .iter()
            .all(|v| v.is_finite() && *v > 0.0);
        if !positive {
            return Err(SimError::InvalidConfig(
                "mass, body length, gravity and bus voltage must be positive".into(),
            ));
        }
        if !(self.transmission_efficiency > 0.0 && self.transmission_efficiency <= 1.0) {
            return Err(SimError::InvalidConfig(format!(
                "transmission efficiency {} must lie in (0, 1]",
                self.transmission_efficiency
            )));
        }
        self.geom
            .validate()
            .map_err(|e| SimError::InvalidConfig(e.to_string()))
    }

    pub fn weight(&self) -> f64 {
        self.mass * self.gravity
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MotorModel {
    pub stall_torque: f64,
    pub no_load_speed: f64,
    pub no_load_current: f64,
    pub stall_current: f64,
}

impl Default for MotorModel {
    /// Approximate small smart-servo figures at a 6 V supply.
    fn default() -> Self {
        Self {
            stall_torque: 0.228,
            no_load_speed: 47.7,
            no_load_current: 0.12,
            stall_current: 1.76,
        }
    }
}

impl MotorModel {
    pub fn validate(&self) -> Result<(), SimError> {
        let ok = self.stall_torque > 0.0
            && self.no_load_speed > 0.0
            && self.no_load_current >= 0.0
            && self.stall_current > self.no_load_current
            && self.stall_current.is_finite();
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidConfig(format!(
                "invalid motor model {self:?}"
            )))
        }
    }
}

/// Affine current model: no-load current plus a share of the stall current
/// proportional to `|torque| / stall_torque`. Speed does not enter.
pub fn motor_current(motor: &MotorModel, torque: f64, _speed: f64) -> Result<f64, SimError> {
    let t = torque.abs();
    if !(t <= motor.stall_torque) {
        return Err(SimError::OverTorque {
            torque,
            stall: motor.stall_torque,
        });
    }
    // Written as a blend so both endpoints are reproduced exactly.
    let s = t / motor.stall_torque;
    Ok((1.0 - s) * motor.no_load_current + s * motor.stall_current)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimOptions {
    pub samples_per_cycle: usize,
    /// Legs sharing the weight in rotary mode.
    pub rotary_support_legs: usize,
    /// Half-width of the spoke angle range, around vertical, over which a
    /// rotary leg carries load.
    pub rotary_support_half_arc: f64,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            samples_per_cycle: 400,
            rotary_support_legs: 2,
            rotary_support_half_arc: PI / 4.0,
        }
    }
}

/// Loads at one sampled instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseSample {
    pub phase: f64,
    pub stance: [bool; 4],
    /// Motor torques `[τ1, τ2]` per leg, N·m.
    pub torques: [[f64; 2]; 4],
    /// Sum of ground reaction forces on the stance feet, N.
    pub vertical_force: f64,
    /// Total draw of all eight motors, A.
    pub current: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub v_ss: f64,
    pub normalized_v: f64,
    pub avg_current: f64,
    /// `+inf` when the robot does not move.
    #[serde(with = "inf_sentinel")]
    pub cot: f64,
    pub stance_torques: Vec<PhaseSample>,
}

impl SimResult {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("sim results always serialize")
    }

    pub fn peak_torque(&self) -> f64 {
        self.stance_torques
            .iter()
            .flat_map(|s| s.torques.iter().flatten())
            .fold(0.0, |m, t| m.max(t.abs()))
    }
}

/// JSON has no infinity; `+inf` is written as the string `"inf"`.
mod inf_sentinel {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) if t == "inf" => Ok(f64::INFINITY),
            Repr::Text(t) => Err(serde::de::Error::custom(format!(
                "expected number or \"inf\", got {t:?}"
            ))),
        }
    }
}

fn finish(cfg: &RobotConfig, v_ss: f64, samples: Vec<PhaseSample>) -> SimResult {
    let avg_current = samples.iter().map(|s| s.current).sum::<f64>() / samples.len() as f64;
    let cot = if v_ss > 0.0 {
        cot_formula(cfg.bus_voltage, avg_current, cfg.mass, cfg.gravity, v_ss)
    } else {
        f64::INFINITY
    };
    SimResult {
        v_ss,
        normalized_v: normalized_speed(v_ss, cfg.body_length),
        avg_current,
        cot,
        stance_torques: samples,
    }
}

fn loaded_sample(
    cfg: &RobotConfig,
    motor: &MotorModel,
    phase: f64,
    joints: &[JointAngles; 4],
    stance: [bool; 4],
) -> Result<PhaseSample, SimError> {
    let down = stance.iter().filter(|&&s| s).count();
    if down == 0 {
        return Err(SimError::NoSupport { phase });
    }
    let share = cfg.weight() / down as f64;
    let mut torques = [[0.0; 2]; 4];
    let mut current = 0.0;
    let mut vertical_force = 0.0;
    for l in 0..4 {
        if stance[l] {
            // The foot pushes down on the ground with its share of the weight.
            let tau = static_torques(&cfg.geom, joints[l], WrenchForce::new(0.0, -share));
            torques[l] = tau.map(|t| t / cfg.transmission_efficiency);
            vertical_force += share;
        }
        for t in torques[l] {
            current += motor_current(motor, t, 0.0)?;
        }
    }
    Ok(PhaseSample {
        phase,
        stance,
        torques,
        vertical_force,
        current,
    })
}

/// Steady-state prediction for a stride gait.
pub fn simulate_gait(
    spec: &GaitSpec,
    cfg: &RobotConfig,
    motor: &MotorModel,
) -> Result<SimResult, SimError> {
    simulate_gait_with(spec, cfg, motor, &SimOptions::default())
}

pub fn simulate_gait_with(
    spec: &GaitSpec,
    cfg: &RobotConfig,
    motor: &MotorModel,
    opts: &SimOptions,
) -> Result<SimResult, SimError> {
    cfg.validate()?;
    motor.validate()?;
    let (step_length, duty) = match spec.path {
        FootPath::Stride {
            step_length, duty, ..
        } => (step_length, duty),
        FootPath::Circle { .. } => return Err(SimError::NotAStride(spec.name.clone())),
    };
    let f = spec.frequency;
    if !(f >= 0.0 && f.is_finite()) {
        return Err(SimError::InvalidConfig(format!("frequency {f}")));
    }
    // A stopped clock holds the phase-zero pose.
    let n = if f > 0.0 {
        opts.samples_per_cycle.max(2)
    } else {
        1
    };

    let mut poses = Vec::with_capacity(n);
    let mut samples = Vec::with_capacity(n);
    for k in 0..n {
        let phase = k as f64 / n as f64;
        let mut joints = [JointAngles::default(); 4];
        let mut act = [ActuatorAngles::default(); 4];
        let mut stance = [false; 4];
        for leg in LegId::ALL {
            let l = leg.index();
            let p = sample_foot(spec, leg, phase);
            let sol = inverse_kinematics(&cfg.geom, p, spec.elbow[l])
                .map_err(|source| SimError::Unreachable { leg, phase, source })?;
            joints[l] = sol.joints;
            act[l] = sol.actuators;
            stance[l] = spec.in_stance(leg, phase);
        }
        samples.push(loaded_sample(cfg, motor, phase, &joints, stance)?);
        poses.push(act);
    }

    if f > 0.0 {
        let dt = 1.0 / (f * n as f64);
        for k in 0..n {
            let (a, b) = (&poses[k], &poses[(k + 1) % n]);
            for l in 0..4 {
                for (x, y) in a[l].as_array().into_iter().zip(b[l].as_array()) {
                    let speed = (unwrap_toward(x, y) - x).abs() / dt;
                    if speed > motor.no_load_speed {
                        return Err(SimError::SpeedViolation {
                            speed,
                            limit: motor.no_load_speed,
                        });
                    }
                }
            }
        }
    }

    let v_ss = if f > 0.0 && step_length > 0.0 {
        step_length * f / duty
    } else {
        0.0
    };
    Ok(finish(cfg, v_ss, samples))
}

/// Steady-state prediction for velocity-mode spoke rolling.
///
/// Each rotation, `rotary_support_legs` legs carry the weight while their
/// spoke sweeps through the support arc around vertical; the load torque is
/// averaged over that arc.
pub fn simulate_rotary(
    cmd: &RotaryCommand,
    cfg: &RobotConfig,
    motor: &MotorModel,
) -> Result<SimResult, SimError> {
    simulate_rotary_with(cmd, cfg, motor, &SimOptions::default())
}

pub fn simulate_rotary_with(
    cmd: &RotaryCommand,
    cfg: &RobotConfig,
    motor: &MotorModel,
    opts: &SimOptions,
) -> Result<SimResult, SimError> {
    cfg.validate()?;
    motor.validate()?;
    let speed = cmd.omega.abs();
    if !(speed <= motor.no_load_speed) {
        return Err(SimError::SpeedViolation {
            speed,
            limit: motor.no_load_speed,
        });
    }
    let support = opts.rotary_support_legs.clamp(1, 4);
    let mut stance = [false; 4];
    // Diagonal pairs first, matching a trot-like spoke phasing.
    for l in [0, 3, 1, 2].into_iter().take(support) {
        stance[l] = true;
    }
    let n = opts.samples_per_cycle.max(2);
    let arc = opts.rotary_support_half_arc;
    let samples = (0..n)
        .map(|k| {
            let frac = (k as f64 + 0.5) / n as f64;
            let tilt = -arc + 2.0 * arc * frac;
            let spoke = JointAngles::new(cmd.posture.q1 + tilt, cmd.posture.q2);
            loaded_sample(cfg, motor, frac, &[spoke; 4], stance)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let v_ss = speed * cmd.spoke_length;
    Ok(finish(cfg, v_ss, samples))
}

/// One row of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub params: GaitParams,
    pub result: SimResult,
}

/// Simulate every parameter set independently, preserving input order.
pub fn sweep(
    params: &[GaitParams],
    cfg: &RobotConfig,
    motor: &MotorModel,
) -> Result<Vec<SweepRow>, SimError> {
    params
        .par_iter()
        .map(|p| {
            let spec = make_gait(p, &cfg.geom)?;
            let result = simulate_gait(&spec, cfg, motor)?;
            Ok(SweepRow {
                params: p.clone(),
                result,
            })
        })
        .collect()
}

pub const SWEEP_HEADER: &str =
    "name,step_length,step_height,body_height,frequency,duty,v_ss,normalized_v,avg_current,cot";

pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> io::Result<()> {
    writeln!(out, "{SWEEP_HEADER}")?;
    for r in rows {
        let p = &r.params;
        let s = &r.result;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            p.name,
            p.step_length,
            p.step_height,
            p.body_height,
            p.frequency,
            p.duty,
            s.v_ss,
            s.normalized_v,
            s.avg_current,
            s.cot
        )?;
    }
    Ok(())
}

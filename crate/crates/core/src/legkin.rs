//! Closed-form kinematics of the coupled 2R leg.
//!
//! The leg is a planar serial chain: the hip actuator drives the upper link
//! directly, and the knee actuator (mounted on the body) drives the lower
//! link through a belt. Kinematics are therefore solved in the classical
//! joint space `q` and mapped to actuator space `θ` through a fixed
//! unimodular coupling:
//!
//! ```text
//! θ = A⁻¹ q,   A⁻¹ = [[1, 0], [1, 1]]
//! q = A θ,     A   = [[1, 0], [-1, 1]]
//! ```
//!
//! Frame convention: x forward, y up, angles measured counter-clockwise from
//! +x. Gravity loads are negative-y. Angles are never wrapped.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance on `|D| - 1` before a target is declared unreachable.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KinematicsError {
    #[error("target ({x}, {y}) is outside the reachable annulus (D = {d})")]
    Unreachable { x: f64, y: f64, d: f64 },
    #[error("invalid leg geometry: l1 = {l1}, l2 = {l2} (both must be positive and finite)")]
    InvalidGeometry { l1: f64, l2: f64 },
}

/// Link lengths of one leg, in metres.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LegGeometry {
    pub l1: f64,
    pub l2: f64,
}

impl LegGeometry {
    pub fn new(l1: f64, l2: f64) -> Result<Self, KinematicsError> {
        let geom = Self { l1, l2 };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if ok(self.l1) && ok(self.l2) {
            Ok(())
        } else {
            Err(KinematicsError::InvalidGeometry {
                l1: self.l1,
                l2: self.l2,
            })
        }
    }

    /// Outer radius of the reachable annulus.
    pub fn reach(&self) -> f64 {
        self.l1 + self.l2
    }

    /// Inner radius of the reachable annulus (zero for equal links).
    pub fn inner_reach(&self) -> f64 {
        (self.l1 - self.l2).abs()
    }

    pub fn is_reachable(&self, p: FootPoint) -> bool {
        let r = p.norm();
        r >= self.inner_reach() && r <= self.reach()
    }
}

impl Default for LegGeometry {
    /// 29 mm + 29 mm: full extension equals the robot's 5.8 cm maximum clearance.
    fn default() -> Self {
        Self {
            l1: 0.029,
            l2: 0.029,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct JointAngles {
    pub q1: f64,
    pub q2: f64,
}

impl JointAngles {
    pub fn new(q1: f64, q2: f64) -> Self {
        Self { q1, q2 }
    }

    /// Reflection across the body plane: `q -> -q`.
    pub fn mirrored(self) -> Self {
        Self {
            q1: -self.q1,
            q2: -self.q2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ActuatorAngles {
    pub theta1: f64,
    pub theta2: f64,
}

impl ActuatorAngles {
    pub fn new(theta1: f64, theta2: f64) -> Self {
        Self { theta1, theta2 }
    }

    pub fn as_array(self) -> [f64; 2] {
        [self.theta1, self.theta2]
    }
}

/// The fixed joint/actuator coupling of the belt-driven knee.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingMap {
    pub a: Matrix2<f64>,
    pub a_inv: Matrix2<f64>,
}

impl CouplingMap {
    pub fn new() -> Self {
        Self {
            a: Matrix2::new(1.0, 0.0, -1.0, 1.0),
            a_inv: Matrix2::new(1.0, 0.0, 1.0, 1.0),
        }
    }
}

impl Default for CouplingMap {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FootPoint {
    pub x: f64,
    pub y: f64,
}

impl FootPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: FootPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Sign of the square root in the knee solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    ElbowPlus,
    ElbowMinus,
}

impl Branch {
    pub fn sign(self) -> f64 {
        match self {
            Branch::ElbowPlus => 1.0,
            Branch::ElbowMinus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Branch::ElbowPlus => Branch::ElbowMinus,
            Branch::ElbowMinus => Branch::ElbowPlus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IkSolution {
    pub joints: JointAngles,
    pub actuators: ActuatorAngles,
    pub branch: Branch,
    /// Cosine of the knee angle, clamped to `[-1, 1]`.
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianPair {
    pub j_q: Matrix2<f64>,
    pub j_theta: Matrix2<f64>,
}

/// Planar force applied by the foot, in newtons.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct WrenchForce {
    pub fx: f64,
    pub fy: f64,
}

impl WrenchForce {
    pub fn new(fx: f64, fy: f64) -> Self {
        Self { fx, fy }
    }
}

pub fn joint_to_actuator(joints: JointAngles) -> ActuatorAngles {
    ActuatorAngles {
        theta1: joints.q1,
        theta2: joints.q1 + joints.q2,
    }
}

pub fn actuator_to_joint(act: ActuatorAngles) -> JointAngles {
    JointAngles {
        q1: act.theta1,
        q2: act.theta2 - act.theta1,
    }
}

pub fn forward_kinematics(geom: &LegGeometry, joints: JointAngles) -> FootPoint {
    let q12 = joints.q1 + joints.q2;
    FootPoint {
        x: geom.l1 * joints.q1.cos() + geom.l2 * q12.cos(),
        y: geom.l1 * joints.q1.sin() + geom.l2 * q12.sin(),
    }
}

pub fn forward_kinematics_actuator(geom: &LegGeometry, act: ActuatorAngles) -> FootPoint {
    forward_kinematics(geom, actuator_to_joint(act))
}

/// Knee cosine `D` for a target, before clamping.
pub fn knee_cosine(geom: &LegGeometry, target: FootPoint) -> f64 {
    let (l1, l2) = (geom.l1, geom.l2);
    (target.x * target.x + target.y * target.y - l1 * l1 - l2 * l2) / (2.0 * l1 * l2)
}

/// Dual-branch closed-form inverse kinematics.
///
/// Targets with `1 < |D| <= 1 + CLAMP_TOLERANCE` are treated as lying on the
/// boundary singularity. At the origin with equal links any `q1` is valid and
/// `q1 = 0` is returned.
pub fn inverse_kinematics(
    geom: &LegGeometry,
    target: FootPoint,
    branch: Branch,
) -> Result<IkSolution, KinematicsError> {
    let raw = knee_cosine(geom, target);
    if !raw.is_finite() || raw.abs() > 1.0 + CLAMP_TOLERANCE {
        return Err(KinematicsError::Unreachable {
            x: target.x,
            y: target.y,
            d: raw,
        });
    }
    let d = raw.clamp(-1.0, 1.0);
    let s = branch.sign() * (1.0 - d * d).sqrt();
    let q2 = s.atan2(d);
    let q1 = target.y.atan2(target.x) - (geom.l2 * s).atan2(geom.l1 + geom.l2 * d);
    let joints = JointAngles { q1, q2 };
    Ok(IkSolution {
        joints,
        actuators: joint_to_actuator(joints),
        branch,
        d,
    })
}

pub fn jacobians(geom: &LegGeometry, joints: JointAngles) -> JacobianPair {
    let (s1, c1) = joints.q1.sin_cos();
    let (s12, c12) = (joints.q1 + joints.q2).sin_cos();
    let (l1, l2) = (geom.l1, geom.l2);
    let j_q = Matrix2::new(-l1 * s1 - l2 * s12, -l2 * s12, l1 * c1 + l2 * c12, l2 * c12);
    JacobianPair {
        j_q,
        j_theta: j_q * CouplingMap::new().a,
    }
}

/// Yoshikawa index `sqrt(det(J Jᵀ))` of a square Jacobian, i.e. `|det J|`.
pub fn yoshikawa(j: &Matrix2<f64>) -> f64 {
    j.determinant().abs()
}

/// Manipulability of the leg at `joints`. The coupling has unit determinant,
/// so joint-space and actuator-space Jacobians give the same value.
pub fn manipulability(geom: &LegGeometry, joints: JointAngles) -> f64 {
    yoshikawa(&jacobians(geom, joints).j_q)
}

/// Actuator torques holding the foot force `load`: `τ = J_θᵀ F`.
pub fn static_torques(geom: &LegGeometry, joints: JointAngles, load: WrenchForce) -> [f64; 2] {
    let tau = jacobians(geom, joints).j_theta.transpose() * Vector2::new(load.fx, load.fy);
    [tau[0], tau[1]]
}

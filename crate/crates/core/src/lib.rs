//! Kinematics, gait synthesis and locomotion analysis for a small quadruped
//! whose legs are coupled 2R linkages with unbounded joints.
//!
//! Conventions: x forward, y up, gravity along −y, the hip at the origin of
//! each leg frame. Angles are radians and are never wrapped — a joint that
//! has turned twice reads 4π. Telemetry angles are degrees.
//!
//! | module | contents |
//! |---|---|
//! | [`legkin`] | coupling map, FK/IK, Jacobians, manipulability, static torques |
//! | [`workspace`] | reachability rasters, five-bar baseline, manipulability maps |
//! | [`gait`] | foot paths, actuator streams, flip recovery, rotary mode, keyframe scripts |
//! | [`sim`] | quasi-static speed, current and cost-of-transport prediction |
//! | [`metrics`] | telemetry parsing, stability, average current, cost of transport |
//! | [`config`] | the JSON tool configuration |
//! | [`cli`] | the `miniq` command-line front end |

// `!(x > y)` is how NaN inputs get rejected throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod config;
pub mod gait;
pub mod legkin;
pub mod metrics;
pub mod sim;
pub mod workspace;

pub use config::ToolConfig;
pub use legkin::{
    ActuatorAngles, Branch, FootPoint, JointAngles, KinematicsError, LegGeometry, WrenchForce,
};

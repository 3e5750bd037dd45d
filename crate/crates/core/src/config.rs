//! Tool configuration: robot, motor, five-bar baseline and named gait presets.
//!
//! Every section is optional in the JSON file; omitted sections take the
//! built-in defaults.
//!
//! ```json
//! {
//!   "robot": { "mass": 0.24, "body_length": 0.088, "geom": { "l1": 0.029, "l2": 0.029 },
//!              "gravity": 9.81, "bus_voltage": 6.0 },
//!   "motor": { "stall_torque": 0.228, "no_load_speed": 47.7,
//!              "no_load_current": 0.12, "stall_current": 1.76 },
//!   "gaits": { "slow_trot": { ... } }
//! }
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gait::GaitParams;
use crate::sim::{MotorModel, RobotConfig};
use crate::workspace::FiveBarGeometry;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("malformed config: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ToolConfig {
    pub robot: RobotConfig,
    pub motor: MotorModel,
    pub fivebar: FiveBarGeometry,
    pub gaits: BTreeMap<String, GaitParams>,
}

impl Default for ToolConfig {
    fn default() -> Self {
        Self {
            robot: RobotConfig::default(),
            motor: MotorModel::default(),
            fivebar: FiveBarGeometry::default(),
            gaits: GaitParams::presets()
                .into_iter()
                .map(|g| (g.name.clone(), g))
                .collect(),
        }
    }
}

impl ToolConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    /// Like [`load`](Self::load), but a missing file yields the defaults.
    pub fn load_or_default(path: &Path) -> Result<Self, ConfigError> {
        match fs::read_to_string(path) {
            Ok(text) => Self::from_json(&text),
            Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(Self::default()),
            Err(source) => Err(ConfigError::Io {
                path: path.display().to_string(),
                source,
            }),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config always serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let invalid = |e: &dyn std::fmt::Display| ConfigError::Invalid(e.to_string());
        self.robot.validate().map_err(|e| invalid(&e))?;
        self.motor.validate().map_err(|e| invalid(&e))?;
        self.fivebar.validate().map_err(|e| invalid(&e))?;
        for (key, g) in &self.gaits {
            if key != &g.name {
                return Err(ConfigError::Invalid(format!(
                    "gait stored under `{key}` is named `{}`",
                    g.name
                )));
            }
            g.validate().map_err(|e| invalid(&e))?;
        }
        Ok(())
    }

    pub fn gait(&self, name: &str) -> Result<&GaitParams, ConfigError> {
        self.gaits.get(name).ok_or_else(|| {
            let known: Vec<_> = self.gaits.keys().map(String::as_str).collect();
            ConfigError::Invalid(format!(
                "no gait preset `{name}` (known: {})",
                known.join(", ")
            ))
        })
    }
}

//! Telemetry ingestion and locomotion metrics.
//!
//! Telemetry CSV format (UTF-8, `.` decimal separator, `#` starts a comment line):
//!
//! ```text
//! t_s,roll_deg,pitch_deg,yaw_deg,current_a
//! 0.00,0.1,-0.4,12.0,1.41
//! 0.06,0.3,-0.1,12.1,1.52
//! ```
//!
//! Angles stay in degrees throughout.

use std::io::Read;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const TELEMETRY_COLUMNS: [&str; 5] = ["t_s", "roll_deg", "pitch_deg", "yaw_deg", "current_a"];

/// Standard gravity used when a config does not say otherwise.
pub const DEFAULT_GRAVITY: f64 = 9.81;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("telemetry parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("telemetry needs at least 2 samples, got {0}")]
    Empty(usize),
    #[error("cost of transport is undefined at zero velocity")]
    ZeroVelocity,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TelemetrySample {
    pub t: f64,
    pub roll: f64,
    pub pitch: f64,
    pub yaw: f64,
    pub current: f64,
}

/// At least two samples with strictly increasing time.
#[derive(Debug, Clone, PartialEq)]
pub struct TelemetryLog {
    samples: Vec<TelemetrySample>,
}

impl TelemetryLog {
    pub fn new(samples: Vec<TelemetrySample>) -> Result<Self, MetricsError> {
        if samples.len() < 2 {
            return Err(MetricsError::Empty(samples.len()));
        }
        if let Some(k) = samples.windows(2).position(|w| !(w[1].t > w[0].t)) {
            return Err(MetricsError::Parse {
                line: k as u64 + 2,
                message: format!(
                    "time must strictly increase ({} then {})",
                    samples[k].t,
                    samples[k + 1].t
                ),
            });
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[TelemetrySample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.samples[self.samples.len() - 1].t - self.samples[0].t
    }
}

/// Parse telemetry CSV. Columns are matched by header name; extra columns are ignored.
pub fn load_telemetry<R: Read>(source: R) -> Result<TelemetryLog, MetricsError> {
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(|e| MetricsError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let mut columns = [0usize; 5];
    for (slot, name) in columns.iter_mut().zip(TELEMETRY_COLUMNS) {
        *slot = headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| MetricsError::Parse {
                line: 1,
                message: format!("missing column `{name}`"),
            })?;
    }

    let mut samples = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| MetricsError::Parse {
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut vals = [0.0; 5];
        for ((v, &col), name) in vals.iter_mut().zip(&columns).zip(TELEMETRY_COLUMNS) {
            let field = record.get(col).unwrap_or("");
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| MetricsError::Parse {
                    line,
                    message: format!("`{name}` is not a finite number: {field:?}"),
                })?;
        }
        if let Some(prev) = samples.last().map(|s: &TelemetrySample| s.t) {
            if !(vals[0] > prev) {
                return Err(MetricsError::Parse {
                    line,
                    message: format!("time must strictly increase ({prev} then {})", vals[0]),
                });
            }
        }
        samples.push(TelemetrySample {
            t: vals[0],
            roll: vals[1],
            pitch: vals[2],
            yaw: vals[3],
            current: vals[4],
        });
    }
    TelemetryLog::new(samples)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub pitch_std: f64,
    pub roll_std: f64,
}

/// Shifted by the first value, so a constant series gives exactly zero and a
/// large constant bias does not eat precision.
fn population_std(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let Some(origin) = values.clone().next() else {
        return 0.0;
    };
    let shifted = values.map(|v| v - origin);
    let n = shifted.clone().count() as f64;
    let mean = shifted.clone().sum::<f64>() / n;
    (shifted.map(|v| (v - mean) * (v - mean)).sum::<f64>() / n).sqrt()
}

/// Population standard deviation of pitch and roll, in degrees.
pub fn stability(log: &TelemetryLog) -> StabilityReport {
    let s = log.samples();
    StabilityReport {
        pitch_std: population_std(s.iter().map(|x| x.pitch)),
        roll_std: population_std(s.iter().map(|x| x.roll)),
    }
}

/// Time-weighted (trapezoidal) mean current.
pub fn average_current(log: &TelemetryLog) -> f64 {
    let s = log.samples();
    let charge: f64 = s
        .windows(2)
        .map(|w| 0.5 * (w[0].current + w[1].current) * (w[1].t - w[0].t))
        .sum();
    charge / log.duration()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyInput {
    pub voltage: f64,
    pub avg_current: f64,
    pub mass: f64,
    pub gravity: f64,
    pub v_ss: f64,
}

/// `V·i / (m·g·v)` with no checks.
pub fn cot_formula(voltage: f64, current: f64, mass: f64, gravity: f64, v_ss: f64) -> f64 {
    voltage * current / (mass * gravity * v_ss)
}

pub fn cost_of_transport(e: &EnergyInput) -> Result<f64, MetricsError> {
    if !(e.v_ss.is_finite() && e.v_ss >= 0.0) {
        return Err(MetricsError::InvalidInput(format!("velocity {}", e.v_ss)));
    }
    if e.v_ss == 0.0 {
        return Err(MetricsError::ZeroVelocity);
    }
    let positive = [e.voltage, e.mass, e.gravity]
        .iter()
        .all(|v| v.is_finite() && *v > 0.0);
    if !positive || !(e.avg_current.is_finite() && e.avg_current >= 0.0) {
        return Err(MetricsError::InvalidInput(format!("{e:?}")));
    }
    Ok(cot_formula(
        e.voltage,
        e.avg_current,
        e.mass,
        e.gravity,
        e.v_ss,
    ))
}

/// Speed in body lengths per second.
pub fn normalized_speed(v: f64, body_length: f64) -> f64 {
    v / body_length
}

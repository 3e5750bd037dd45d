//! Rasterized workspaces and manipulability fields.
//!
//! Rasters are square grids over a rectangle. Cell `(i, j)` has its center at
//! `(x_min + (i + 0.5)·Δx, y_min + (j + 0.5)·Δy)` and is stored row-major with
//! `j = 0` at `y_min`. A cell counts as reachable iff its center is.

use std::f64::consts::PI;
use std::io::{self, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::legkin::{
    actuator_to_joint, inverse_kinematics, manipulability, ActuatorAngles, Branch, FootPoint,
    JointAngles, LegGeometry,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WorkspaceError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("five-bar cannot assemble anywhere: proximal + distal = {reach} < half hip separation {half_sep}")]
    DegenerateGeometry { reach: f64, half_sep: f64 },
    #[error("invalid five-bar geometry: {0}")]
    InvalidFiveBar(String),
    #[error("grids have different specs")]
    GridMismatch,
    #[error("samples per axis must be at least 8, got {0}")]
    TooFewSamples(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub resolution: usize,
}

impl GridSpec {
    pub fn new(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        resolution: usize,
    ) -> Result<Self, WorkspaceError> {
        let spec = Self {
            x_min,
            x_max,
            y_min,
            y_max,
            resolution,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Square grid `[-half, half]²`.
    pub fn centered(half: f64, resolution: usize) -> Result<Self, WorkspaceError> {
        Self::new(-half, half, -half, half, resolution)
    }

    pub fn validate(&self) -> Result<(), WorkspaceError> {
        let finite = [self.x_min, self.x_max, self.y_min, self.y_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(WorkspaceError::InvalidGrid("non-finite bounds".into()));
        }
        if self.x_max <= self.x_min || self.y_max <= self.y_min {
            return Err(WorkspaceError::InvalidGrid("empty extent".into()));
        }
        if self.resolution < 2 {
            return Err(WorkspaceError::InvalidGrid(format!(
                "resolution {} < 2",
                self.resolution
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.resolution as f64
    }

    pub fn dy(&self) -> f64 {
        (self.y_max - self.y_min) / self.resolution as f64
    }

    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    pub fn len(&self) -> usize {
        self.resolution * self.resolution
    }

    pub fn is_empty(&self) -> bool {
        self.resolution == 0
    }

    pub fn center(&self, i: usize, j: usize) -> FootPoint {
        FootPoint::new(
            self.x_min + (i as f64 + 0.5) * self.dx(),
            self.y_min + (j as f64 + 0.5) * self.dy(),
        )
    }

    /// Cell containing `p`, as `(i, j)`, or `None` outside the grid.
    pub fn cell_of(&self, p: FootPoint) -> Option<(usize, usize)> {
        let fx = (p.x - self.x_min) / self.dx();
        let fy = (p.y - self.y_min) / self.dy();
        if !(fx >= 0.0 && fy >= 0.0) {
            return None;
        }
        let (i, j) = (fx.floor() as usize, fy.floor() as usize);
        (i < self.resolution && j < self.resolution).then_some((i, j))
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.resolution + i
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorkspaceGrid {
    pub spec: GridSpec,
    pub reachable: Vec<bool>,
    pub cell_area: f64,
}

impl WorkspaceGrid {
    fn from_cells(spec: GridSpec, reachable: Vec<bool>) -> Self {
        Self {
            cell_area: spec.cell_area(),
            spec,
            reachable,
        }
    }

    pub fn count(&self) -> usize {
        self.reachable.iter().filter(|&&r| r).count()
    }

    pub fn area(&self) -> f64 {
        self.count() as f64 * self.cell_area
    }

    pub fn is_reachable(&self, i: usize, j: usize) -> bool {
        self.reachable[self.spec.index(i, j)]
    }

    /// 1.0 for reachable cells, 0.0 otherwise.
    pub fn to_field(&self) -> ScalarField {
        ScalarField {
            spec: self.spec,
            values: self
                .reachable
                .iter()
                .map(|&r| if r { 1.0 } else { 0.0 })
                .collect(),
        }
    }
}

/// Per-cell scalar values; `NaN` marks undefined cells.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

impl ScalarField {
    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.spec.index(i, j)]
    }

    /// Largest defined value and the cell holding it (first in row-major order on ties).
    pub fn argmax(&self) -> Option<(usize, usize, f64)> {
        let res = self.spec.resolution;
        let mut best: Option<(usize, f64)> = None;
        for (k, &v) in self.values.iter().enumerate() {
            if v.is_nan() {
                continue;
            }
            if best.is_none_or(|(_, b)| v > b) {
                best = Some((k, v));
            }
        }
        best.map(|(k, v)| (k % res, k / res, v))
    }

    /// `x,y,value` rows in storage order, preceded by a header line.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "x,y,value")?;
        let res = self.spec.resolution;
        for j in 0..res {
            for i in 0..res {
                let c = self.spec.center(i, j);
                writeln!(out, "{},{},{}", c.x, c.y, self.value(i, j))?;
            }
        }
        Ok(())
    }

    /// Binary 8-bit PGM (P5). The first image row is `y_max`; values are
    /// scaled linearly from `[0, max]` to `[0, 255]` and `NaN` maps to 0.
    pub fn write_pgm<W: Write>(&self, mut out: W) -> io::Result<()> {
        let res = self.spec.resolution;
        let max = self
            .values
            .iter()
            .copied()
            .filter(|v| v.is_finite())
            .fold(0.0_f64, f64::max);
        write!(out, "P5\n{res} {res}\n255\n")?;
        let mut row = vec![0u8; res];
        for j in (0..res).rev() {
            for (i, px) in row.iter_mut().enumerate() {
                let v = self.value(i, j);
                *px = if v.is_finite() && max > 0.0 {
                    (v.max(0.0) / max * 255.0).round() as u8
                } else {
                    0
                };
            }
            out.write_all(&row)?;
        }
        Ok(())
    }
}

/// Serial 2R reachable set: the annulus `|l1 - l2| <= r <= l1 + l2`.
pub fn serial_workspace(geom: &LegGeometry, spec: &GridSpec) -> WorkspaceGrid {
    let res = spec.resolution;
    let reachable = (0..spec.len())
        .into_par_iter()
        .map(|k| geom.is_reachable(spec.center(k % res, k / res)))
        .collect();
    WorkspaceGrid::from_cells(*spec, reachable)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleRange {
    pub min: f64,
    pub max: f64,
}

impl AngleRange {
    pub fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn around(center: f64, half_width: f64) -> Self {
        Self::new(center - half_width, center + half_width)
    }

    /// `n` evenly spaced angles including both ends.
    pub fn lattice(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let span = self.max - self.min;
        (0..n).map(move |k| self.min + span * k as f64 / (n - 1) as f64)
    }
}

/// Coplanar five-bar leg: two hip motors separated by `hip_separation` along x,
/// each driving a proximal link; the two distal links meet at the toe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiveBarGeometry {
    pub hip_separation: f64,
    pub proximal: f64,
    pub distal: f64,
    /// Motor angle limits, left hip first.
    pub limits: [AngleRange; 2],
}

impl Default for FiveBarGeometry {
    /// Illustrative parallel-leg baseline: 12 mm hip spacing, 18 mm / 34 mm
    /// links, each motor free over 150° pointing down and outward.
    fn default() -> Self {
        Self {
            hip_separation: 0.012,
            proximal: 0.018,
            distal: 0.034,
            limits: [
                AngleRange::new(-7.0 * PI / 6.0, -PI / 3.0),
                AngleRange::new(-2.0 * PI / 3.0, PI / 6.0),
            ],
        }
    }
}

impl FiveBarGeometry {
    pub fn validate(&self) -> Result<(), WorkspaceError> {
        if !(self.proximal > 0.0 && self.distal > 0.0) {
            return Err(WorkspaceError::InvalidFiveBar(
                "link lengths must be positive".into(),
            ));
        }
        if !(self.hip_separation >= 0.0) {
            return Err(WorkspaceError::InvalidFiveBar(
                "hip separation must be non-negative".into(),
            ));
        }
        if self.limits.iter().any(|l| !(l.min < l.max)) {
            return Err(WorkspaceError::InvalidFiveBar(
                "limit intervals must have min < max".into(),
            ));
        }
        let half_sep = self.hip_separation / 2.0;
        let reach = self.proximal + self.distal;
        if reach < half_sep {
            return Err(WorkspaceError::DegenerateGeometry { reach, half_sep });
        }
        Ok(())
    }

    pub fn hips(&self) -> [FootPoint; 2] {
        let h = self.hip_separation / 2.0;
        [FootPoint::new(-h, 0.0), FootPoint::new(h, 0.0)]
    }

    pub fn knees(&self, alpha: [f64; 2]) -> [FootPoint; 2] {
        let [h1, h2] = self.hips();
        let knee = |h: FootPoint, a: f64| {
            FootPoint::new(h.x + self.proximal * a.cos(), h.y + self.proximal * a.sin())
        };
        [knee(h1, alpha[0]), knee(h2, alpha[1])]
    }

    /// Toe position for motor angles `alpha`, or `None` when the distal links
    /// cannot close (or the knees coincide and the toe is undetermined).
    ///
    /// The toe is the intersection on the clockwise side of the left-knee to
    /// right-knee vector, which is the lower intersection in a downward stance.
    pub fn toe(&self, alpha: [f64; 2]) -> Option<FootPoint> {
        let [k1, k2] = self.knees(alpha);
        let (vx, vy) = (k2.x - k1.x, k2.y - k1.y);
        let dist = vx.hypot(vy);
        let scale = self.proximal + self.distal;
        if dist <= 1e-12 * scale || dist > 2.0 * self.distal {
            return None;
        }
        let half = dist / 2.0;
        let h = (self.distal * self.distal - half * half).max(0.0).sqrt();
        let (nx, ny) = (vy / dist, -vx / dist);
        Some(FootPoint::new(
            k1.x + vx / 2.0 + h * nx,
            k1.y + vy / 2.0 + h * ny,
        ))
    }
}

/// Five-bar reachable raster from a `samples_per_axis²` sweep of the motor limits.
pub fn fivebar_workspace(
    fb: &FiveBarGeometry,
    spec: &GridSpec,
    samples_per_axis: usize,
) -> Result<WorkspaceGrid, WorkspaceError> {
    fb.validate()?;
    if samples_per_axis < 8 {
        return Err(WorkspaceError::TooFewSamples(samples_per_axis));
    }
    let alpha1: Vec<f64> = fb.limits[0].lattice(samples_per_axis).collect();
    let alpha2: Vec<f64> = fb.limits[1].lattice(samples_per_axis).collect();
    let hits: Vec<Vec<usize>> = alpha1
        .par_iter()
        .map(|&a1| {
            alpha2
                .iter()
                .filter_map(|&a2| fb.toe([a1, a2]))
                .filter_map(|p| spec.cell_of(p))
                .map(|(i, j)| spec.index(i, j))
                .collect()
        })
        .collect();
    let mut reachable = vec![false; spec.len()];
    for k in hits.into_iter().flatten() {
        reachable[k] = true;
    }
    Ok(WorkspaceGrid::from_cells(*spec, reachable))
}

/// Manipulability at each reachable cell center via inverse kinematics on `branch`.
pub fn manipulability_map(geom: &LegGeometry, spec: &GridSpec, branch: Branch) -> ScalarField {
    let res = spec.resolution;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let p = spec.center(k % res, k / res);
            if !geom.is_reachable(p) {
                return f64::NAN;
            }
            inverse_kinematics(geom, p, branch)
                .map(|sol| manipulability(geom, sol.joints))
                .unwrap_or(f64::NAN)
        })
        .collect();
    ScalarField {
        spec: *spec,
        values,
    }
}

/// Coordinates spanning a configuration-space map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleSpace {
    /// Axes are `(q1, q2)`.
    Joint,
    /// Axes are `(θ1, θ2)`.
    Actuator,
}

/// Manipulability over a uniform `[-π, π]²` grid of joint or actuator angles.
///
/// The Cartesian index is identical for both coordinate choices; what differs
/// is how dexterity is laid out over the commanded angles.
pub fn configuration_manipulability(
    geom: &LegGeometry,
    space: AngleSpace,
    resolution: usize,
) -> Result<ScalarField, WorkspaceError> {
    let spec = GridSpec::centered(PI, resolution)?;
    let values = (0..spec.len())
        .into_par_iter()
        .map(|k| {
            let c = spec.center(k % resolution, k / resolution);
            let joints = match space {
                AngleSpace::Joint => JointAngles::new(c.x, c.y),
                AngleSpace::Actuator => actuator_to_joint(ActuatorAngles::new(c.x, c.y)),
            };
            manipulability(geom, joints)
        })
        .collect();
    Ok(ScalarField { spec, values })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub area_a: f64,
    pub area_b: f64,
    /// `area_b / area_a`, absent when `a` is empty.
    pub ratio: Option<f64>,
    pub b_contained_in_a: bool,
}

pub fn compare_workspaces(
    a: &WorkspaceGrid,
    b: &WorkspaceGrid,
) -> Result<ComparisonReport, WorkspaceError> {
    if a.spec != b.spec {
        return Err(WorkspaceError::GridMismatch);
    }
    let (area_a, area_b) = (a.area(), b.area());
    let contained = a
        .reachable
        .iter()
        .zip(&b.reachable)
        .all(|(&ra, &rb)| ra || !rb);
    Ok(ComparisonReport {
        area_a,
        area_b,
        ratio: (area_a > 0.0).then(|| area_b / area_a),
        b_contained_in_a: contained,
    })
}

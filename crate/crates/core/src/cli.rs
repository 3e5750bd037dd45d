//! The `miniq` command-line front end.
//!
//! Every subcommand prints one compact JSON object on stdout. Bulk output
//! (rasters, trajectories, sweeps) goes to `--out PATH`:
//!
//! * rasters: `.pgm` writes an 8-bit binary PGM (top row = largest y, values
//!   scaled linearly from 0 to the field maximum, NaN as 0); any other
//!   extension writes CSV with header `x,y,value`;
//! * trajectories: CSV with header `t_s,fl_t1,fl_t2,...,rr_t2`, radians;
//! * `sim gait --sweep`: CSV, one row per frequency.
//!
//! Command-line angles are radians; telemetry angles are degrees.
//!
//! Exit status: 0 on success, 1 on a domain error (the failing module's error
//! variant is reported as `{"error": "<Variant>", ...}` on stderr), 2 on a
//! usage error or an unparseable input file.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{ConfigError, ToolConfig};
use crate::gait::{
    flip_recovery, gait_to_actuator, make_gait, rotary_command, ActuatorTrajectory, GaitError,
    GaitSpec, KeyframeScript, StreamOptions,
};
use crate::legkin::{
    actuator_to_joint, forward_kinematics, inverse_kinematics, jacobians, joint_to_actuator,
    manipulability, ActuatorAngles, Branch, FootPoint, JointAngles, KinematicsError, LegGeometry,
};
use crate::metrics::{
    average_current, cost_of_transport, load_telemetry, normalized_speed, stability, EnergyInput,
    MetricsError,
};
use crate::sim::{self, SimError, SimOptions};
use crate::workspace::{
    compare_workspaces, configuration_manipulability, fivebar_workspace, manipulability_map,
    serial_workspace, AngleSpace, GridSpec, ScalarField, WorkspaceError,
};

pub const DEFAULT_CONFIG: &str = "miniq.json";
pub const CONFIG_ENV: &str = "MINIQ_CONFIG";

/// Two comma-separated numbers, e.g. `0,1.5708`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pair(pub f64, pub f64);

impl FromStr for Pair {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 2 {
            return Err(format!("expected two comma-separated numbers, got `{s}`"));
        }
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("`{t}` is not a finite number"))
        };
        Ok(Pair(num(parts[0])?, num(parts[1])?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BranchArg {
    Plus,
    Minus,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Self {
        match b {
            BranchArg::Plus => Branch::ElbowPlus,
            BranchArg::Minus => Branch::ElbowMinus,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapSpace {
    /// Over foot position, via inverse kinematics.
    Cartesian,
    /// Over joint angles `(q1, q2)` in `[-π, π]²`.
    Joint,
    /// Over actuator angles `(θ1, θ2)` in `[-π, π]²`.
    Actuator,
}

#[derive(Debug, Parser)]
#[command(
    name = "miniq",
    version,
    about = "Coupled 2R quadruped kinematics, gaits and metrics"
)]
pub struct Cli {
    /// Tool configuration (JSON). Falls back to $MINIQ_CONFIG, then ./miniq.json, then built-in defaults.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Override leg link lengths, metres.
    #[arg(long, global = true, value_name = "L1,L2")]
    pub geom: Option<Pair>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inverse kinematics of a foot target.
    Ik {
        #[arg(long, value_name = "X,Y", allow_hyphen_values = true)]
        target: Pair,
        #[arg(long, value_enum, default_value = "plus")]
        branch: BranchArg,
    },
    /// Forward kinematics from joint (`--q`) or actuator (`--theta`) angles.
    Fk(AngleArgs),
    /// Joint- and actuator-space Jacobians.
    Jac(AngleArgs),
    /// Manipulability index.
    Manip(AngleArgs),
    /// Reachable-area raster of the serial leg.
    Workspace(GridArgs),
    /// Manipulability raster.
    ManipMap {
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, value_enum, default_value = "cartesian")]
        space: MapSpace,
        #[arg(long, value_enum, default_value = "plus")]
        branch: BranchArg,
    },
    /// Serial leg against the configured five-bar baseline on a shared grid.
    Compare {
        #[command(flatten)]
        grid: GridArgs,
        /// Motor-angle samples per axis for the five-bar sweep.
        #[arg(long, default_value_t = 721)]
        samples: usize,
    },
    #[command(subcommand)]
    Gait(GaitCommand),
    #[command(subcommand)]
    Sim(SimCommand),
    /// Stability, average current and cost of transport from a telemetry log.
    Metrics {
        #[arg(long, value_name = "PATH")]
        log: PathBuf,
        /// Steady-state speed, m/s; enables cost of transport.
        #[arg(long)]
        v: Option<f64>,
    },
}

#[derive(Debug, Args)]
pub struct AngleArgs {
    #[arg(
        long,
        value_name = "Q1,Q2",
        allow_hyphen_values = true,
        conflicts_with = "theta",
        required_unless_present = "theta"
    )]
    pub q: Option<Pair>,
    #[arg(long, value_name = "T1,T2", allow_hyphen_values = true)]
    pub theta: Option<Pair>,
}

impl AngleArgs {
    fn joints(&self) -> JointAngles {
        match (self.q, self.theta) {
            (Some(Pair(a, b)), _) => JointAngles::new(a, b),
            (None, Some(Pair(a, b))) => actuator_to_joint(ActuatorAngles::new(a, b)),
            (None, None) => unreachable!("clap enforces one of --q/--theta"),
        }
    }
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Cells per axis.
    #[arg(long, default_value_t = 401)]
    pub res: usize,
    /// Half-width of the square grid, metres; defaults to the leg reach plus 5%.
    #[arg(long)]
    pub half: Option<f64>,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum GaitCommand {
    /// Actuator stream of a preset gait, or of a hip-centred circle.
    Synth {
        /// Preset name from the config.
        #[arg(long, default_value = "slow_trot", conflicts_with = "circle")]
        preset: String,
        /// Trace a hip-centred circle of this radius instead, metres.
        #[arg(long)]
        circle: Option<f64>,
        /// Circle frequency, Hz.
        #[arg(long, default_value_t = 1.0)]
        freq: f64,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        #[arg(long, default_value_t = 1)]
        cycles: usize,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Inversion recovery from the last row of a trajectory (default: standing pose).
    Flip {
        #[arg(long, value_name = "PATH")]
        from: Option<PathBuf>,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Render a keyframe script (built-in name or JSON file).
    Script {
        #[arg(long, conflicts_with = "file", required_unless_present = "file")]
        name: Option<String>,
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
        #[arg(long, default_value_t = 0.005)]
        dt: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SimCommand {
    /// Quasi-static prediction for a preset gait.
    Gait {
        #[arg(long, default_value = "slow_trot")]
        preset: String,
        /// Override step length, metres.
        #[arg(long)]
        step: Option<f64>,
        /// Override stride frequency, Hz.
        #[arg(long)]
        freq: Option<f64>,
        /// Simulate each of these frequencies and write a CSV to --out.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        sweep: Option<Vec<f64>>,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Quasi-static prediction for spoke rolling.
    Rotary {
        /// Actuator rate, rad/s.
        #[arg(long, allow_hyphen_values = true)]
        omega: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
}

/// A failure ready to be reported: machine-readable name, originating module,
/// human message and exit status.
#[derive(Debug)]
pub struct CliError {
    pub name: String,
    pub module: &'static str,
    pub message: String,
    pub code: i32,
}

impl CliError {
    fn domain(module: &'static str, name: &str, message: String) -> Self {
        Self {
            name: name.to_string(),
            module,
            message,
            code: 1,
        }
    }

    fn usage(name: &str, message: String) -> Self {
        Self {
            name: name.to_string(),
            module: "cli",
            message,
            code: 2,
        }
    }

    fn to_json(&self) -> String {
        json!({ "error": self.name, "module": self.module, "message": self.message }).to_string()
    }
}

/// Leading identifier of a `Debug` rendering, i.e. the enum variant name.
fn variant<E: std::fmt::Debug>(e: &E) -> String {
    format!("{e:?}")
        .chars()
        .take_while(|c| c.is_alphanumeric() || *c == '_')
        .collect()
}

impl From<KinematicsError> for CliError {
    fn from(e: KinematicsError) -> Self {
        Self::domain("legkin", &variant(&e), e.to_string())
    }
}

impl From<WorkspaceError> for CliError {
    fn from(e: WorkspaceError) -> Self {
        Self::domain("workspace", &variant(&e), e.to_string())
    }
}

impl From<GaitError> for CliError {
    fn from(e: GaitError) -> Self {
        let mut err = Self::domain("gait", &variant(&e), e.to_string());
        if matches!(
            e,
            GaitError::InvalidScript(_) | GaitError::InvalidTrajectory(_)
        ) {
            err.code = 2;
        }
        err
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Gait(g) => g.into(),
            e => Self::domain("sim", &variant(&e), e.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        let mut err = Self::domain("metrics", &variant(&e), e.to_string());
        if matches!(e, MetricsError::Parse { .. }) {
            err.code = 2;
        }
        err
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        let mut err = Self::usage(&variant(&e), e.to_string());
        err.module = "config";
        err
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError::usage("Io", format!("{}: {e}", path.display()))
}

type CliResult = Result<Value, CliError>;

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("outputs always serialize")
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_error(path, e))
}

fn write_field(field: &ScalarField, path: &Path) -> Result<(), CliError> {
    let mut out = create(path)?;
    let pgm = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
    let res = if pgm {
        field.write_pgm(&mut out)
    } else {
        field.write_csv(&mut out)
    };
    res.and_then(|_| out.flush()).map_err(|e| io_error(path, e))
}

fn write_trajectory(traj: &ActuatorTrajectory, path: &Path) -> Result<(), CliError> {
    let mut out = create(path)?;
    traj.write_csv(&mut out)
        .and_then(|_| out.flush())
        .map_err(|e| io_error(path, e))
}

fn trajectory_summary(traj: &ActuatorTrajectory) -> Value {
    json!({
        "samples": traj.len(),
        "dt": traj.dt,
        "duration": traj.duration(),
        "max_rate": if traj.dt > 0.0 { traj.max_step() / traj.dt } else { 0.0 },
    })
}

fn grid_spec(grid: &GridArgs, geom: &LegGeometry) -> Result<GridSpec, CliError> {
    let half = grid.half.unwrap_or(1.05 * geom.reach());
    Ok(GridSpec::centered(half, grid.res)?)
}

/// Default pose for commands that need one: every foot below the hip at 60% of reach.
fn standing_pose(geom: &LegGeometry) -> Result<[ActuatorAngles; 4], CliError> {
    let target = FootPoint::new(0.0, -0.6 * geom.reach());
    let sol = inverse_kinematics(geom, target, Branch::ElbowPlus)?;
    Ok([sol.actuators; 4])
}

fn resolve_config(cli: &Cli) -> Result<ToolConfig, CliError> {
    let mut cfg = match (&cli.config, std::env::var_os(CONFIG_ENV)) {
        (Some(path), _) => ToolConfig::load(path)?,
        (None, Some(path)) => ToolConfig::load(Path::new(&path))?,
        (None, None) => ToolConfig::load_or_default(Path::new(DEFAULT_CONFIG))?,
    };
    if let Some(Pair(l1, l2)) = cli.geom {
        cfg.robot.geom = LegGeometry::new(l1, l2)?;
    }
    Ok(cfg)
}

fn execute(cli: &Cli) -> CliResult {
    let cfg = resolve_config(cli)?;
    let geom = cfg.robot.geom;
    match &cli.command {
        Command::Ik { target, branch } => {
            let sol =
                inverse_kinematics(&geom, FootPoint::new(target.0, target.1), (*branch).into())?;
            Ok(to_value(&sol))
        }
        Command::Fk(a) => Ok(to_value(&forward_kinematics(&geom, a.joints()))),
        Command::Jac(a) => {
            let j = jacobians(&geom, a.joints());
            let rows =
                |m: &nalgebra::Matrix2<f64>| [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]];
            Ok(json!({ "j_q": rows(&j.j_q), "j_theta": rows(&j.j_theta) }))
        }
        Command::Manip(a) => {
            let q = a.joints();
            Ok(json!({ "w": manipulability(&geom, q), "q": q, "theta": joint_to_actuator(q) }))
        }
        Command::Workspace(grid) => {
            let spec = grid_spec(grid, &geom)?;
            let ws = serial_workspace(&geom, &spec);
            if let Some(path) = &grid.out {
                write_field(&ws.to_field(), path)?;
            }
            let analytic =
                std::f64::consts::PI * (geom.reach().powi(2) - geom.inner_reach().powi(2));
            Ok(json!({
                "resolution": spec.resolution,
                "cells": ws.count(),
                "area": ws.area(),
                "analytic_area": analytic,
            }))
        }
        Command::ManipMap {
            grid,
            space,
            branch,
        } => {
            let field = match space {
                MapSpace::Cartesian => {
                    manipulability_map(&geom, &grid_spec(grid, &geom)?, (*branch).into())
                }
                MapSpace::Joint => {
                    configuration_manipulability(&geom, AngleSpace::Joint, grid.res)?
                }
                MapSpace::Actuator => {
                    configuration_manipulability(&geom, AngleSpace::Actuator, grid.res)?
                }
            };
            if let Some(path) = &grid.out {
                write_field(&field, path)?;
            }
            let peak = field.argmax().map(|(i, j, w)| {
                let c = field.spec.center(i, j);
                json!({ "x": c.x, "y": c.y, "w": w })
            });
            Ok(json!({ "resolution": field.spec.resolution, "argmax": peak }))
        }
        Command::Compare { grid, samples } => {
            let half = grid.half.unwrap_or(
                1.05 * geom.reach().max(
                    cfg.fivebar.hip_separation / 2.0 + cfg.fivebar.proximal + cfg.fivebar.distal,
                ),
            );
            let spec = GridSpec::centered(half, grid.res)?;
            let serial = serial_workspace(&geom, &spec);
            let five = fivebar_workspace(&cfg.fivebar, &spec, *samples)?;
            if let Some(path) = &grid.out {
                let mut field = serial.to_field();
                for (v, &r) in field.values.iter_mut().zip(&five.reachable) {
                    if r {
                        *v += 1.0;
                    }
                }
                write_field(&field, path)?;
            }
            Ok(to_value(&compare_workspaces(&serial, &five)?))
        }
        Command::Gait(g) => gait_command(g, &cfg),
        Command::Sim(s) => sim_command(s, &cfg),
        Command::Metrics { log, v } => {
            let file = File::open(log).map_err(|e| io_error(log, e))?;
            let telemetry = load_telemetry(BufReader::new(file))?;
            let report = stability(&telemetry);
            let current = average_current(&telemetry);
            let mut out = json!({
                "samples": telemetry.len(),
                "duration": telemetry.duration(),
                "avg_current": current,
                "pitch_std": report.pitch_std,
                "roll_std": report.roll_std,
            });
            if let Some(v) = *v {
                let cot = cost_of_transport(&EnergyInput {
                    voltage: cfg.robot.bus_voltage,
                    avg_current: current,
                    mass: cfg.robot.mass,
                    gravity: cfg.robot.gravity,
                    v_ss: v,
                })?;
                out["v_ss"] = json!(v);
                out["cot"] = json!(cot);
                out["normalized_v"] = json!(normalized_speed(v, cfg.robot.body_length));
            }
            Ok(out)
        }
    }
}

fn gait_command(cmd: &GaitCommand, cfg: &ToolConfig) -> CliResult {
    let geom = cfg.robot.geom;
    let omega = cfg.motor.no_load_speed;
    match cmd {
        GaitCommand::Synth {
            preset,
            circle,
            freq,
            dt,
            cycles,
            out,
        } => {
            let spec: GaitSpec = match circle {
                Some(r) => {
                    if !(*r > geom.inner_reach() && *r < geom.reach()) {
                        return Err(GaitError::InvalidParams(format!(
                            "circle radius {r} outside the annulus ({}, {})",
                            geom.inner_reach(),
                            geom.reach()
                        ))
                        .into());
                    }
                    GaitSpec::hip_circle(*r, *freq, Branch::ElbowPlus)
                }
                None => make_gait(cfg.gait(preset)?, &geom)?,
            };
            if !(spec.frequency > 0.0) {
                return Err(GaitError::InvalidParams("frequency must be positive".into()).into());
            }
            let traj = gait_to_actuator(&spec, &geom, *dt, *cycles, &StreamOptions::new(omega))?;
            if let Some(path) = out {
                write_trajectory(&traj, path)?;
            }
            let mut v = trajectory_summary(&traj);
            v["gait"] = json!(spec.name);
            v["frequency"] = json!(spec.frequency);
            Ok(v)
        }
        GaitCommand::Flip { from, dt, out } => {
            let start = match from {
                Some(path) => {
                    let file = File::open(path).map_err(|e| io_error(path, e))?;
                    let traj = ActuatorTrajectory::read_csv(BufReader::new(file))?;
                    *traj.samples.last().ok_or_else(|| {
                        CliError::from(GaitError::InvalidTrajectory("no samples".into()))
                    })?
                }
                None => standing_pose(&geom)?,
            };
            let traj = flip_recovery(&start, *dt, omega)?;
            if let Some(path) = out {
                write_trajectory(&traj, path)?;
            }
            Ok(trajectory_summary(&traj))
        }
        GaitCommand::Script {
            name,
            file,
            dt,
            out,
        } => {
            let script = match (name, file) {
                (Some(n), _) => KeyframeScript::builtin(n).ok_or_else(|| {
                    let known: Vec<_> = KeyframeScript::builtin_names().collect();
                    CliError::usage(
                        "UnknownScript",
                        format!("no built-in script `{n}` (known: {})", known.join(", ")),
                    )
                })?,
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                    KeyframeScript::from_json(&text)?
                }
                (None, None) => unreachable!("clap enforces one of --name/--file"),
            };
            let traj = script.render(&geom, *dt, omega, &standing_pose(&geom)?)?;
            if let Some(path) = out {
                write_trajectory(&traj, path)?;
            }
            Ok(trajectory_summary(&traj))
        }
    }
}

fn sim_command(cmd: &SimCommand, cfg: &ToolConfig) -> CliResult {
    match cmd {
        SimCommand::Gait {
            preset,
            step,
            freq,
            sweep,
            out,
        } => {
            let mut params = cfg.gait(preset)?.clone();
            if let Some(s) = step {
                params.step_length = *s;
            }
            if let Some(f) = freq {
                params.frequency = *f;
            }
            if let Some(freqs) = sweep {
                let set: Vec<_> = freqs
                    .iter()
                    .map(|&f| {
                        let mut p = params.clone();
                        p.frequency = f;
                        p
                    })
                    .collect();
                let rows = sim::sweep(&set, &cfg.robot, &cfg.motor)?;
                if let Some(path) = out {
                    let mut w = create(path)?;
                    sim::write_sweep_csv(&rows, &mut w)
                        .and_then(|_| w.flush())
                        .map_err(|e| io_error(path, e))?;
                }
                let summary: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        json!({
                            "frequency": r.params.frequency,
                            "v_ss": r.result.v_ss,
                            "avg_current": r.result.avg_current,
                            "cot": finite_or_inf(r.result.cot),
                        })
                    })
                    .collect();
                return Ok(json!({ "gait": params.name, "sweep": summary }));
            }
            let spec = make_gait(&params, &cfg.robot.geom)?;
            let result =
                sim::simulate_gait_with(&spec, &cfg.robot, &cfg.motor, &SimOptions::default())?;
            write_json_out(out.as_deref(), &result)?;
            Ok(to_value(&result))
        }
        SimCommand::Rotary { omega, out } => {
            let cmd = rotary_command(*omega, &cfg.robot.geom);
            let result = sim::simulate_rotary(&cmd, &cfg.robot, &cfg.motor)?;
            write_json_out(out.as_deref(), &result)?;
            Ok(to_value(&result))
        }
    }
}

fn finite_or_inf(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        json!("inf")
    }
}

fn write_json_out<T: Serialize>(path: Option<&Path>, v: &T) -> Result<(), CliError> {
    if let Some(path) = path {
        let mut w = create(path)?;
        serde_json::to_writer_pretty(&mut w, v)
            .map_err(io::Error::from)
            .and_then(|_| writeln!(w))
            .and_then(|_| w.flush())
            .map_err(|e| io_error(path, e))?;
    }
    Ok(())
}

/// Run the tool on `args` (including the program name) and return the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(&cli) {
        Ok(v) => {
            let _ = writeln!(stdout, "{v}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "{}", e.to_json());
            e.code
        }
    }
}

//! Acceptance suite: one line per criterion, non-zero exit if any fails.
//!
//! Run with `cargo test -p miniq --test acceptance`.

use std::f64::consts::{PI, TAU};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use miniq::gait::{
    flip_recovery, gait_to_actuator, make_gait, rotary_command, GaitParams, GaitSpec, LegId,
    StreamOptions, FLIP_DEADLINE,
};
use miniq::legkin::{
    actuator_to_joint, forward_kinematics, forward_kinematics_actuator, inverse_kinematics,
    jacobians, joint_to_actuator, yoshikawa, ActuatorAngles, Branch, FootPoint, JointAngles,
    LegGeometry,
};
use miniq::metrics::{
    average_current, cot_formula, normalized_speed, stability, TelemetryLog, TelemetrySample,
};
use miniq::sim::{simulate_gait, simulate_rotary, MotorModel, RobotConfig};
use miniq::workspace::{
    compare_workspaces, fivebar_workspace, manipulability_map, serial_workspace, FiveBarGeometry,
    GridSpec,
};

// Pinned tolerances.
const COT_TROT_REL: f64 = 0.01;
const COT_CRAWL_REL: f64 = 0.06;
const COT_RUNTIME: Duration = Duration::from_secs(1);
/// One unit in the last printed digit of the reference values.
const NORM_SPEED_ABS: f64 = 0.01;
const ROUND_TRIP_REL: f64 = 1e-9;
const ROUND_TRIP_RUNTIME: Duration = Duration::from_secs(5);
const FD_STEP: f64 = 1e-6;
const FD_ABS: f64 = 1e-6;
/// Manipulability agreement, relative to the peak value `l1·l2`.
const MANIP_REL: f64 = 1e-12;
const MANIP_MAP_RES: usize = 801;
const AREA_RES: usize = 801;
const METRICS_REL: f64 = 0.01;
const FORCE_ABS: f64 = 1e-9;

const SEED: u64 = 0x6d69_6e69;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn random_geometry(rng: &mut StdRng) -> LegGeometry {
    LegGeometry::new(rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0)).unwrap()
}

fn c1_cot_table() -> Outcome {
    let start = Instant::now();
    // (gait, v_ss, current, printed COT, tolerance)
    let rows = [
        ("slow trot", 0.12, 0.543, 11.5, COT_TROT_REL),
        ("fast trot", 0.46, 1.473, 8.1, COT_TROT_REL),
        ("high trot", 0.16, 0.449, 7.1, COT_TROT_REL),
        ("crawl", 0.03, 0.220, 19.7, COT_CRAWL_REL),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, v, i, printed, tol) in rows {
        let cot = cot_formula(6.0, i, 0.240, 9.81, v);
        let rel = (cot - printed).abs() / printed;
        ok &= rel <= tol;
        parts.push(format!(
            "{name} {cot:.3} vs {printed} ({:+.2}%)",
            100.0 * (cot - printed) / printed
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < COT_RUNTIME;
    check(
        ok,
        format!(
            "{}; crawl row is inconsistent with its own v and i",
            parts.join(", ")
        ),
    )
}

fn c2_normalized_speed() -> Outcome {
    let a = normalized_speed(0.46, 0.088);
    let b = normalized_speed(0.43, 0.08);
    let ok = (a - 5.22).abs() <= NORM_SPEED_ABS && (b - 5.38).abs() <= NORM_SPEED_ABS;
    check(ok, format!("{a:.4} vs 5.22, {b:.4} vs 5.38"))
}

fn c3_round_trip() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(SEED);
    let mut worst: f64 = 0.0;
    let n = 100_000;
    for _ in 0..n {
        let geom = random_geometry(&mut rng);
        let r = rng.gen_range(geom.inner_reach()..=geom.reach());
        let phi = rng.gen_range(-PI..PI);
        let target = FootPoint::new(r * phi.cos(), r * phi.sin());
        for branch in [Branch::ElbowPlus, Branch::ElbowMinus] {
            let sol = inverse_kinematics(&geom, target, branch).map_err(|e| e.to_string())?;
            let err = forward_kinematics(&geom, sol.joints).distance(target) / geom.reach();
            let err_act =
                forward_kinematics_actuator(&geom, sol.actuators).distance(target) / geom.reach();
            worst = worst.max(err).max(err_act);
        }
    }
    let elapsed = start.elapsed();
    check(
        worst <= ROUND_TRIP_REL && elapsed < ROUND_TRIP_RUNTIME,
        format!(
            "{n} targets x 2 branches, max error {worst:.2e}·(l1+l2), {:.2} s",
            elapsed.as_secs_f64()
        ),
    )
}

fn c4_jacobians() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 4);
    let (mut worst_q, mut worst_t): (f64, f64) = (0.0, 0.0);
    for _ in 0..10_000 {
        let geom = random_geometry(&mut rng);
        let q = JointAngles::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let t = joint_to_actuator(q);
        let j = jacobians(&geom, q);
        for c in 0..2 {
            let dq = |s: f64| {
                let mut v = [q.q1, q.q2];
                v[c] += s;
                forward_kinematics(&geom, JointAngles::new(v[0], v[1]))
            };
            let dt = |s: f64| {
                let mut v = [t.theta1, t.theta2];
                v[c] += s;
                forward_kinematics_actuator(&geom, ActuatorAngles::new(v[0], v[1]))
            };
            let (p, m) = (dq(FD_STEP), dq(-FD_STEP));
            worst_q = worst_q
                .max(((p.x - m.x) / (2.0 * FD_STEP) - j.j_q[(0, c)]).abs())
                .max(((p.y - m.y) / (2.0 * FD_STEP) - j.j_q[(1, c)]).abs());
            let (p, m) = (dt(FD_STEP), dt(-FD_STEP));
            worst_t = worst_t
                .max(((p.x - m.x) / (2.0 * FD_STEP) - j.j_theta[(0, c)]).abs())
                .max(((p.y - m.y) / (2.0 * FD_STEP) - j.j_theta[(1, c)]).abs());
        }
    }
    check(
        worst_q <= FD_ABS && worst_t <= FD_ABS,
        format!("10000 configurations, max |J_q - FD| {worst_q:.2e}, max |J_θ - FD| {worst_t:.2e}"),
    )
}

fn c5_manipulability() -> Outcome {
    let mut rng = StdRng::seed_from_u64(SEED + 5);
    let (mut worst_a, mut worst_b, mut worst_strict): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..10_000 {
        let geom = random_geometry(&mut rng);
        let q = JointAngles::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let j = jacobians(&geom, q);
        let scale = geom.l1 * geom.l2;
        let analytic = scale * q.q2.sin().abs();
        let (wq, wt) = (yoshikawa(&j.j_q), yoshikawa(&j.j_theta));
        worst_a = worst_a.max((wq - analytic).abs() / scale);
        worst_b = worst_b.max((wt - wq).abs() / scale);
        if q.q2.sin().abs() > 1e-3 {
            worst_strict = worst_strict.max((wq - analytic).abs() / analytic);
        }
    }
    let (ok_a, ok_b) = (worst_a <= MANIP_REL, worst_b <= MANIP_REL);

    let geom = LegGeometry::default();
    let spec = GridSpec::centered(1.05 * geom.reach(), MANIP_MAP_RES).map_err(|e| e.to_string())?;
    let field = manipulability_map(&geom, &spec, Branch::ElbowPlus);
    let (i, j, _) = field.argmax().ok_or("empty map")?;
    let r = spec.center(i, j).norm();
    let ring = geom.l1.hypot(geom.l2);
    let ok_c = (r - ring).abs() <= spec.dx();

    check(
        ok_a && ok_b && ok_c,
        format!(
            "(a) max |w_det - l1·l2·|sin q2|| = {worst_a:.1e}·l1·l2 (relative {worst_strict:.1e} away from singularities); \
             (b) max |w(J_θ) - w(J_q)| = {worst_b:.1e}·l1·l2; \
             (c) argmax r = {r:.6} vs {ring:.6}, cell {:.6}",
            spec.dx()
        ),
    )
}

fn c6_workspace() -> Outcome {
    let mut parts = Vec::new();
    let mut ok = true;
    for (l1, l2) in [(0.029, 0.029), (0.04, 0.018), (1.0, 0.3)] {
        let geom = LegGeometry::new(l1, l2).map_err(|e| e.to_string())?;
        let spec = GridSpec::centered(1.02 * geom.reach(), AREA_RES).map_err(|e| e.to_string())?;
        let area = serial_workspace(&geom, &spec).area();
        let analytic = PI * (geom.reach().powi(2) - geom.inner_reach().powi(2));
        let rel = (area - analytic).abs() / analytic;
        ok &= rel <= 2.0 / AREA_RES as f64;
        parts.push(format!("({l1}, {l2}) rel {rel:.1e}"));
    }

    let geom = LegGeometry::default();
    let fb = FiveBarGeometry::default();
    let spec = GridSpec::centered(1.05 * geom.reach(), 401).map_err(|e| e.to_string())?;
    let serial = serial_workspace(&geom, &spec);
    let five = fivebar_workspace(&fb, &spec, 721).map_err(|e| e.to_string())?;
    let report = compare_workspaces(&serial, &five).map_err(|e| e.to_string())?;
    let ratio = report.ratio.unwrap_or(f64::NAN);
    ok &= report.b_contained_in_a && ratio < 1.0;
    check(
        ok,
        format!(
            "area within 2/res: {}; five-bar contained {} ratio {ratio:.3}",
            parts.join(", "),
            report.b_contained_in_a
        ),
    )
}

fn c7_unbounded_winding() -> Outcome {
    let geom = LegGeometry::default();
    let omega_max = MotorModel::default().no_load_speed;
    let cycles = 12;
    let spec = GaitSpec::hip_circle(0.04, 2.0, Branch::ElbowPlus);
    let dt = 0.001;
    let traj = gait_to_actuator(&spec, &geom, dt, cycles, &StreamOptions::new(omega_max))
        .map_err(|e| e.to_string())?;
    let per_cycle = (spec.period() / dt).round() as usize;
    let mut ok = true;
    let mut worst_turn: f64 = 0.0;
    let mut max_step: f64 = 0.0;
    for leg in LegId::ALL {
        let t1 = traj.channel(leg, 0);
        for w in t1.windows(2) {
            let step = w[1] - w[0];
            ok &= step > 0.0;
            max_step = max_step.max(step.abs());
        }
        for k in 1..=cycles {
            let advance = t1[k * per_cycle] - t1[(k - 1) * per_cycle];
            worst_turn = worst_turn.max((advance - TAU).abs());
        }
    }
    ok &= worst_turn < 1e-9 && max_step < PI && max_step <= omega_max * dt;
    check(
        ok,
        format!(
            "{cycles} cycles, θ1 strictly increasing, per-cycle advance within {worst_turn:.1e} of 2π, largest step {max_step:.4} rad"
        ),
    )
}

fn c8_flip() -> Outcome {
    let geom = LegGeometry::default();
    let omega_max = MotorModel::default().no_load_speed;
    let mut rng = StdRng::seed_from_u64(SEED + 8);
    let mut longest: f64 = 0.0;
    let mut worst_fk: f64 = 0.0;
    for _ in 0..500 {
        let mut pose = [ActuatorAngles::default(); 4];
        for p in &mut pose {
            // Arbitrary accumulated turns on each actuator.
            *p = ActuatorAngles::new(rng.gen_range(-30.0..30.0), rng.gen_range(-30.0..30.0));
        }
        let once = flip_recovery(&pose, 0.002, omega_max).map_err(|e| e.to_string())?;
        let mid = *once.samples.last().unwrap_or(&pose);
        let twice = flip_recovery(&mid, 0.002, omega_max).map_err(|e| e.to_string())?;
        let end = *twice.samples.last().unwrap_or(&mid);
        longest = longest.max(once.duration()).max(twice.duration());
        for l in 0..4 {
            let a = forward_kinematics(&geom, actuator_to_joint(pose[l]));
            let b = forward_kinematics(&geom, actuator_to_joint(end[l]));
            worst_fk = worst_fk.max(a.distance(b));
        }
    }
    check(
        longest <= FLIP_DEADLINE && worst_fk < 1e-12,
        format!("500 poses, longest flip {longest:.3} s (limit {FLIP_DEADLINE} s), double-flip FK drift {worst_fk:.1e} m"),
    )
}

fn c9_simulator() -> Outcome {
    let cfg = RobotConfig::default();
    let motor = MotorModel::default();
    let params = GaitParams {
        step_length: 0.02,
        frequency: 2.0,
        duty: 0.5,
        ..GaitParams::slow_trot()
    };
    let spec = make_gait(&params, &cfg.geom).map_err(|e| e.to_string())?;
    let trot = simulate_gait(&spec, &cfg, &motor).map_err(|e| e.to_string())?;
    let rotary = simulate_rotary(&rotary_command(5.0, &cfg.geom), &cfg, &motor)
        .map_err(|e| e.to_string())?;

    let mut worst_force: f64 = 0.0;
    for p in GaitParams::presets().into_iter().chain([params]) {
        let spec = make_gait(&p, &cfg.geom).map_err(|e| e.to_string())?;
        let r = simulate_gait(&spec, &cfg, &motor).map_err(|e| e.to_string())?;
        for s in r.stance_torques.iter().chain(&rotary.stance_torques) {
            worst_force = worst_force.max((s.vertical_force - cfg.mass * cfg.gravity).abs());
        }
    }
    let rotary_exact = rotary.v_ss == 5.0 * cfg.geom.reach();
    let rotary_close = (rotary.v_ss - 0.29).abs() <= 4.0 * f64::EPSILON * 0.29;
    check(
        trot.v_ss == 0.08 && rotary_exact && rotary_close && worst_force <= FORCE_ABS,
        format!(
            "trot v_ss = {:?}, rotary v_ss = {:?} (= ω·(l1+l2) in f64), max |ΣF - m·g| = {worst_force:.1e} N",
            trot.v_ss, rotary.v_ss
        ),
    )
}

fn log_from(rows: impl Iterator<Item = (f64, f64, f64, f64)>) -> TelemetryLog {
    let samples = rows
        .map(|(t, roll, pitch, current)| TelemetrySample {
            t,
            roll,
            pitch,
            yaw: 0.0,
            current,
        })
        .collect();
    TelemetryLog::new(samples).expect("valid synthetic log")
}

fn c10_metrics() -> Outcome {
    let constant = log_from((0..50).map(|k| (k as f64 * 0.06, 1.5, -0.7, 0.5)));
    let s = stability(&constant);
    let ok_const = s.pitch_std == 0.0 && s.roll_std == 0.0 && average_current(&constant) == 0.5;

    let amp = 2.0;
    let n = 20_000;
    let sine = log_from((0..n).map(|k| {
        let t = k as f64 * 0.001;
        (t, 0.0, amp * (TAU * 2.5 * t).sin(), 1.0)
    }));
    let std = stability(&sine).pitch_std;
    let expected = amp / 2f64.sqrt();
    let ok_sine = (std - expected).abs() / expected <= METRICS_REL;

    let ramp = log_from([(0.0, 0.0, 0.0, 0.0), (1.0, 0.0, 0.0, 1.0)].into_iter());
    let uneven = log_from(
        [0.0, 0.01, 0.5, 0.52, 2.0]
            .into_iter()
            .map(|t| (t, 0.0, 0.0, 0.75)),
    );
    let ok_trap = average_current(&ramp) == 0.5 && average_current(&uneven) == 0.75;

    check(
        ok_const && ok_sine && ok_trap,
        format!(
            "constant std (0, 0); sinusoid std {std:.4} vs {expected:.4}; trapezoid {} and {}",
            average_current(&ramp),
            average_current(&uneven)
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("cost-of-transport table", c1_cot_table),
        ("normalized speed", c2_normalized_speed),
        ("IK/FK round trip", c3_round_trip),
        ("Jacobian vs finite differences", c4_jacobians),
        ("manipulability", c5_manipulability),
        ("workspace area and five-bar containment", c6_workspace),
        ("unbounded joint winding", c7_unbounded_winding),
        ("flip recovery", c8_flip),
        ("simulator kinematic oracle", c9_simulator),
        ("telemetry metrics", c10_metrics),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name} [{ms} ms]: {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{ms} ms]: {detail}", k + 1);
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
